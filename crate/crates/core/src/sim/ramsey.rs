//! Ramsey-style probes of the crosstalk contexts.

use super::{simulate, Mode, NoiseFlags, NoiseModel};
use crate::circuit::{Circuit, Gate};
use crate::device::DeviceModel;
use crate::error::{Error, Result};
use crate::pipeline::{compile, CompileOptions, PassList};

/// Qubit layout of a probe. Gate scenarios repeat the gate twice per interval
/// so the ideal evolution of every interval is the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RamseyCase {
    /// One idle qubit (qubit 0).
    SingleIdle,
    /// Two coupled idle qubits (0, 1), both probed.
    JointIdle,
    /// Probe 0 next to the control of ECR(1, 2).
    ControlSpectator,
    /// Probe 0 next to the target of ECR(2, 1).
    TargetSpectator,
    /// ECR(1, 0) and ECR(2, 3); the adjacent controls 1 and 2 are probed.
    ControlControl,
}

impl RamseyCase {
    pub fn num_qubits(self) -> usize {
        match self {
            RamseyCase::SingleIdle => 1,
            RamseyCase::JointIdle => 2,
            RamseyCase::ControlSpectator | RamseyCase::TargetSpectator => 3,
            RamseyCase::ControlControl => 4,
        }
    }

    pub fn probes(self) -> Vec<usize> {
        match self {
            RamseyCase::SingleIdle => vec![0],
            RamseyCase::JointIdle => vec![0, 1],
            RamseyCase::ControlSpectator | RamseyCase::TargetSpectator => vec![0],
            RamseyCase::ControlControl => vec![1, 2],
        }
    }

    fn gates(self) -> Vec<[usize; 2]> {
        match self {
            RamseyCase::SingleIdle | RamseyCase::JointIdle => vec![],
            RamseyCase::ControlSpectator => vec![[1, 2]],
            RamseyCase::TargetSpectator => vec![[2, 1]],
            RamseyCase::ControlControl => vec![[1, 0], [2, 3]],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suppression {
    None,
    AlignedDd,
    CaDd,
    CaEc,
    Combo,
}

impl Suppression {
    pub fn pipeline(self) -> &'static str {
        match self {
            Suppression::None => "bare",
            Suppression::AlignedDd => "dd",
            Suppression::CaDd => "ca-dd",
            Suppression::CaEc => "ca-ec",
            Suppression::Combo => "combo",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RamseyConfig {
    pub case: RamseyCase,
    pub suppression: Suppression,
    /// Idle interval for the idle scenarios; gate scenarios use the gate duration.
    pub tau_ns: f64,
    pub d_max: usize,
    /// Decoupling pulse width; `None` uses the device X duration.
    pub pulse_ns: Option<f64>,
}

/// Probes in `|+>`, `d` intervals, then Hadamards so that `|+...+>` reads as zeros.
pub fn ramsey_circuit(case: RamseyCase, d: usize, tau_ns: f64) -> Circuit {
    let n = case.num_qubits();
    let had = hadamard();
    let mut c = Circuit::new(n);
    for &p in &case.probes() {
        c.push(had.clone(), &[p]);
    }
    for _ in 0..d {
        let gates = case.gates();
        if gates.is_empty() {
            c.push(Gate::Barrier, &[]);
            for &p in &case.probes() {
                c.push(Gate::Delay(tau_ns), &[p]);
            }
        } else {
            for _ in 0..2 {
                c.push(Gate::Barrier, &[]);
                for g in &gates {
                    c.push(Gate::Ecr, g);
                }
            }
        }
    }
    c.push(Gate::Barrier, &[]);
    for &p in &case.probes() {
        c.push(had.clone(), &[p]);
    }
    c
}

fn hadamard() -> Gate {
    Gate::from_parts("h", &[]).expect("h is a known gate")
}

/// Overlap of the probes with `|+>` after `d = 0..=d_max` intervals, averaged
/// over charge-parity signs when that term is enabled.
pub fn ramsey_fidelity(cfg: &RamseyConfig, device: &DeviceModel, flags: NoiseFlags) -> Result<Vec<f64>> {
    let case = cfg.case;
    if device.num_qubits < case.num_qubits() {
        return Err(Error::InvalidDevice(format!("scenario needs {} qubits", case.num_qubits())));
    }
    let mut dev = device.clone();
    dev.num_qubits = case.num_qubits();
    dev.couplings.retain(|c| c.q0 < dev.num_qubits && c.q1 < dev.num_qubits);
    dev.stark_terms.retain(|s| s.spectator < dev.num_qubits && s.driven_pair.0 < dev.num_qubits && s.driven_pair.1 < dev.num_qubits);
    dev.charge_parity.retain(|p| p.qubit < dev.num_qubits);
    let passes = PassList::named(cfg.suppression.pipeline(), false)?;
    let noise = NoiseModel::from_device(&dev, flags);
    let probes = case.probes();
    let zeros = vec![0u8; probes.len()];
    (0..=cfg.d_max)
        .map(|d| {
            let c = ramsey_circuit(case, d, cfg.tau_ns);
            let opts = CompileOptions { pulse_ns: cfg.pulse_ns, ..CompileOptions::default() };
            let out = compile(&c, &dev, &passes, 0, &opts)?;
            let r = simulate(&out.circuit, &noise, Mode::Exact)?;
            Ok(r.prob_bits(&probes, &zeros))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::ChargeParity;
    use std::f64::consts::PI;

    fn cfg(case: RamseyCase, s: Suppression) -> RamseyConfig {
        RamseyConfig { case, suppression: s, tau_ns: 500.0, d_max: 6, pulse_ns: None }
    }

    #[test]
    fn joint_idle_bare_matches_closed_form() {
        // U = RZZ(th) RZ(-th) RZ(-th) per interval; probes start in |++>
        let nu = 5e4;
        let dev = DeviceModel::line(2, nu);
        let f = ramsey_fidelity(&cfg(RamseyCase::JointIdle, Suppression::None), &dev, NoiseFlags::ALL).unwrap();
        let th = PI * nu * 500e-9;
        for (d, fd) in f.iter().enumerate() {
            let a = d as f64 * th;
            // amplitudes of |++> overlap: average of exp(-i phase) over the 4 basis states
            let mut amp = crate::math::c(0.0, 0.0);
            for b0 in [1.0, -1.0] {
                for b1 in [1.0, -1.0] {
                    let phase = a / 2.0 * (b0 * b1) - a / 2.0 * b0 - a / 2.0 * b1;
                    amp += crate::math::c(0.0, -phase).exp() / 4.0;
                }
            }
            assert!((fd - amp.norm_sqr()).abs() < 1e-12, "d={d}: {fd} vs {}", amp.norm_sqr());
        }
        assert!(f[3] < 0.99);
    }

    #[test]
    fn ca_ec_exact_in_every_case() {
        let dev = DeviceModel::line(4, 1e5);
        for case in [
            RamseyCase::JointIdle,
            RamseyCase::ControlSpectator,
            RamseyCase::TargetSpectator,
            RamseyCase::ControlControl,
        ] {
            let f = ramsey_fidelity(&cfg(case, Suppression::CaEc), &dev, NoiseFlags::COHERENT).unwrap();
            let bare = ramsey_fidelity(&cfg(case, Suppression::None), &dev, NoiseFlags::COHERENT).unwrap();
            assert!(f.iter().all(|x| (x - 1.0).abs() < 1e-9), "{case:?}: {f:?}");
            assert!(bare.iter().any(|x| *x < 0.999), "{case:?}: {bare:?}");
        }
    }

    #[test]
    fn aligned_dd_leaves_pure_zz() {
        let nu = 1e5;
        let dev = DeviceModel::line(2, nu);
        let f = ramsey_fidelity(&cfg(RamseyCase::JointIdle, Suppression::AlignedDd), &dev, NoiseFlags::ALL).unwrap();
        // coincident pulses suspend the coupling for two pulse widths per interval
        let th = PI * nu * (500.0 - 2.0 * 35.0) * 1e-9;
        for (d, fd) in f.iter().enumerate() {
            // |<++| RZZ(d th) |++>|^2 = cos^2(d th / 2)
            let want = (d as f64 * th / 2.0).cos().powi(2);
            assert!((fd - want).abs() < 1e-9, "d={d}: {fd} vs {want}");
        }
        let ca = ramsey_fidelity(&cfg(RamseyCase::JointIdle, Suppression::CaDd), &dev, NoiseFlags::ALL).unwrap();
        assert!(ca.iter().zip(&f).skip(1).all(|(c, a)| c > a), "{ca:?}");
        let sharp = RamseyConfig { pulse_ns: Some(0.0), ..cfg(RamseyCase::JointIdle, Suppression::CaDd) };
        let ca = ramsey_fidelity(&sharp, &dev, NoiseFlags::ALL).unwrap();
        assert!(ca.iter().all(|x| (x - 1.0).abs() < 1e-12), "{ca:?}");
    }

    #[test]
    fn parity_only_dd_restores_and_ec_does_not() {
        let mut dev = DeviceModel::line(1, 0.0);
        dev.charge_parity.push(ChargeParity { qubit: 0, delta_hz: 2e5 });
        let flags = NoiseFlags { zz: false, stark: false, parity: true };
        let bare = ramsey_fidelity(&cfg(RamseyCase::SingleIdle, Suppression::None), &dev, flags).unwrap();
        let dd = ramsey_fidelity(&cfg(RamseyCase::SingleIdle, Suppression::CaDd), &dev, flags).unwrap();
        let ec = ramsey_fidelity(&cfg(RamseyCase::SingleIdle, Suppression::CaEc), &dev, flags).unwrap();
        assert!(dd.iter().all(|x| (x - 1.0).abs() < 1e-6), "{dd:?}");
        assert!(bare.iter().any(|x| *x < 0.99));
        for (b, e) in bare.iter().zip(&ec) {
            assert!((b - e).abs() < 1e-12);
        }
    }
}

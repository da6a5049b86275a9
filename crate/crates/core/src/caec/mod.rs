//! Context-aware error compensation.
//!
//! The coherent ZZ and Stark phases picked up in every timed layer are tracked
//! in a ledger of pending `RZ`/`RZZ` corrections. Entries are pushed through
//! gates that preserve `Z` and flushed into the first gate that can host them;
//! only entries with no reachable host become explicit correction layers.

mod compensate;
mod dynamic;
mod ledger;

pub use compensate::{compensate, Compensation, CompensationReport, Disposition};
pub use dynamic::compensate_dynamic;
pub use ledger::{
    absorb_rz, absorb_rzz, accumulate, accumulate_with, classify_edge, commute_through, CommuteOutcome,
    CompensationLedger, ContextCase,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cadd::{context_aware_dd, DdOptions};
    use crate::circuit::{Circuit, Gate};
    use crate::device::{build_interaction_graph, DeviceModel, StarkTerm};
    use crate::schedule::schedule;
    use crate::sim::{noisy_unitary, unitary_oracle, NoiseModel};
    use crate::stratify::stratify;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_device(n: usize, rng: &mut ChaCha8Rng) -> DeviceModel {
        let mut d = DeviceModel::line(n, 0.0);
        for c in &mut d.couplings {
            c.zz_hz = rng.gen_range(2e4..1.5e5);
        }
        if n >= 3 {
            d.stark_terms.push(StarkTerm { driven_pair: (1, 2), spectator: 0, shift_hz: 3e4 });
        }
        d
    }

    fn random_circuit(n: usize, layers: usize, rng: &mut ChaCha8Rng, twoq: &[Gate]) -> Circuit {
        let mut c = Circuit::new(n);
        for _ in 0..layers {
            for q in 0..n {
                match rng.gen_range(0..6) {
                    0 => {}
                    1 => {
                        c.push(Gate::X, &[q]);
                    }
                    2 => {
                        c.push(Gate::SX, &[q]);
                    }
                    3 => {
                        c.push(Gate::RZ(rng.gen_range(-3.0..3.0)), &[q]);
                    }
                    _ => {
                        let a = rng.gen_range(-3.0..3.0);
                        let b = rng.gen_range(0.0..3.0);
                        let g = rng.gen_range(-3.0..3.0);
                        c.push(Gate::U1q { alpha: a, beta: b, gamma: g }, &[q]);
                    }
                }
            }
            let mut q = rng.gen_range(0..2);
            while q + 1 < n {
                if rng.gen_bool(0.6) {
                    let g = twoq[rng.gen_range(0..twoq.len())].clone();
                    if rng.gen_bool(0.5) {
                        c.push(g, &[q, q + 1]);
                    } else {
                        c.push(g, &[q + 1, q]);
                    }
                }
                q += 2 + rng.gen_range(0..2);
            }
        }
        c
    }

    fn assert_exact(input: &crate::ScheduledCircuit, out: &crate::ScheduledCircuit, dev: &DeviceModel) {
        let ideal = unitary_oracle(input).unwrap();
        let noisy = noisy_unitary(out, &NoiseModel::coherent(dev)).unwrap();
        let f = ideal.phase_fidelity(&noisy);
        assert!((1.0 - f).abs() < 1e-10, "fidelity {f}");
    }

    #[test]
    fn random_circuits_become_exact() {
        let gates = [
            Gate::Ecr,
            Gate::Cnot,
            Gate::RZZ(0.4),
            Gate::UCan { alpha: 0.3, beta: 0.2, gamma: 0.1 },
        ];
        for seed in 0..40 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2..6);
            let dev = random_device(n, &mut rng);
            let c = random_circuit(n, rng.gen_range(1..6), &mut rng, &gates);
            let s = schedule(&stratify(&c).unwrap(), &dev).unwrap();
            let (out, _) = compensate(&s, &dev).unwrap();
            out.check_invariants().unwrap();
            assert_exact(&s, &out, &dev);
            // the noisy input is genuinely wrong most of the time
            let _ = noisy_unitary(&s, &NoiseModel::coherent(&dev)).unwrap();
        }
    }

    #[test]
    fn after_dd_becomes_exact() {
        for seed in 0..15 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let n = rng.gen_range(3..6);
            let dev = random_device(n, &mut rng);
            let c = random_circuit(n, 3, &mut rng, &[Gate::Ecr, Gate::Cnot]);
            let s = schedule(&stratify(&c).unwrap(), &dev).unwrap();
            let opts = DdOptions { pulse_ns: 0.0, ..DdOptions::default() };
            let (dd, _) = context_aware_dd(&s, &build_interaction_graph(&dev), &opts).unwrap();
            let (out, _) = compensate(&dd, &dev).unwrap();
            assert_exact(&s, &out, &dev);
        }
    }

    #[test]
    fn spectator_phase_absorbed_into_next_gate() {
        let mut dev = DeviceModel::line(3, 0.0);
        dev.couplings[0].zz_hz = 1e5;
        let mut c = Circuit::new(3);
        c.push(Gate::SX, &[0]).push(Gate::Ecr, &[1, 2]).push(Gate::Barrier, &[0, 1, 2]).push(Gate::SX, &[0]);
        let s = schedule(&stratify(&c).unwrap(), &dev).unwrap();
        let (out, rep) = compensate(&s, &dev).unwrap();
        assert_eq!(rep.compensations.len(), 1);
        let comp = &rep.compensations[0];
        assert_eq!(comp.qubits, vec![0]);
        assert_eq!(comp.disposition, Disposition::Absorbed);
        assert!((comp.angle - 0.157080).abs() < 1e-6);
        assert_eq!(out.makespan(), s.makespan());
        assert_exact(&s, &out, &dev);
    }

    #[test]
    fn idle_pair_absorbed_by_ucan_host() {
        // pair (0,1) idles next to a UCan on the same pair in the following layer
        let dev = DeviceModel::line(4, 8e4);
        let mut c = Circuit::new(4);
        let u = Gate::UCan { alpha: 0.2, beta: 0.2, gamma: 0.2 };
        c.push(u.clone(), &[2, 3]).push(Gate::Barrier, &[0, 1, 2, 3]).push(u.clone(), &[0, 1]);
        let s = schedule(&stratify(&c).unwrap(), &dev).unwrap();
        let (out, rep) = compensate(&s, &dev).unwrap();
        assert_eq!(rep.inserted_two_qubit(), 0);
        assert_eq!(rep.inserted_layers, 0);
        assert!(rep.count(Disposition::Absorbed) >= 1);
        assert_eq!(out.makespan(), s.makespan());
        assert_exact(&s, &out, &dev);
    }

    #[test]
    fn control_pair_needs_insertion() {
        let dev = DeviceModel::line(4, 8e4);
        let mut c = Circuit::new(4);
        c.push(Gate::Ecr, &[1, 0]).push(Gate::Ecr, &[2, 3]).push(Gate::SX, &[1]);
        let s = schedule(&stratify(&c).unwrap(), &dev).unwrap();
        let (out, rep) = compensate(&s, &dev).unwrap();
        assert_eq!(rep.inserted_two_qubit(), 1);
        assert!(out.makespan() > s.makespan());
        assert_exact(&s, &out, &dev);
    }

    #[test]
    fn measured_residue_dropped() {
        let dev = DeviceModel::line(2, 8e4);
        let mut c = Circuit::new(2);
        c.push(Gate::Ecr, &[0, 1]);
        c.push(Gate::Measure { clbit: 0 }, &[0]).push(Gate::Measure { clbit: 1 }, &[1]);
        let s = schedule(&stratify(&c).unwrap(), &dev).unwrap();
        let (_, rep) = compensate(&s, &dev).unwrap();
        assert!(rep.count(Disposition::Dropped) >= 1);
        assert_eq!(rep.count(Disposition::Inserted), 0);
    }

    #[test]
    fn dynamic_needs_feedforward() {
        let dev = DeviceModel::line(2, 8e4);
        let mut c = Circuit::new(2);
        c.push(Gate::Measure { clbit: 0 }, &[0]);
        let s = schedule(&stratify(&c).unwrap(), &dev).unwrap();
        assert!(matches!(compensate_dynamic(&s, &dev, None), Err(crate::Error::MissingCondition)));
    }

    fn bell_dynamic() -> Circuit {
        let mut c = Circuit::new(3);
        c.push(Gate::from_parts("h", &[]).unwrap(), &[0]);
        c.push(Gate::Cnot, &[0, 1]).push(Gate::Cnot, &[1, 2]);
        c.push(Gate::from_parts("h", &[]).unwrap(), &[0]);
        c.push(Gate::Measure { clbit: 0 }, &[0]);
        c.push(Gate::Conditional { gate: Box::new(Gate::Z), clbit: 0, value: 1 }, &[1]);
        c.push(Gate::Cnot, &[1, 2]);
        c.push(Gate::from_parts("h", &[]).unwrap(), &[1]);
        c
    }

    fn p00(s: &crate::ScheduledCircuit, dev: &DeviceModel) -> f64 {
        let r = crate::sim::simulate(s, &NoiseModel::coherent(dev), crate::sim::Mode::Exact).unwrap();
        r.prob_bits(&[1, 2], &[0, 0])
    }

    #[test]
    fn dynamic_exact_at_true_feedforward() {
        let dev = DeviceModel::line(3, 5e4);
        let s = schedule(&stratify(&bell_dynamic()).unwrap(), &dev).unwrap();
        let ideal = crate::sim::simulate_ideal(&s).unwrap().prob_bits(&[1, 2], &[0, 0]);
        assert!((ideal - 1.0).abs() < 1e-12);
        assert!(p00(&s, &dev) < 0.9);
        let (out, rep) = compensate_dynamic(&s, &dev, None).unwrap();
        assert!(rep.count(Disposition::Conditional) >= 1);
        assert!((p00(&out, &dev) - 1.0).abs() < 1e-10);
        let (off, _) = compensate_dynamic(&s, &dev, Some(600.0)).unwrap();
        assert!(p00(&off, &dev) < 1.0 - 1e-4);
    }
}

//! Ordered pass lists and the named suppression pipelines.

use crate::cadd::{context_aware_dd, default_d_min, DdOptions, DdReport};
use crate::caec::{compensate, compensate_dynamic, CompensationReport};
use crate::circuit::{Circuit, Gate, ScheduledCircuit};
use crate::device::{build_interaction_graph, DeviceModel};
use crate::error::{Error, Result};
use crate::schedule::schedule;
use crate::stratify::stratify;
use crate::twirl::{ensure_boundary_layers, pauli_twirl, TwirlRecord};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pass {
    Stratify,
    Schedule,
    Twirl,
    /// Aligned (same color everywhere) decoupling.
    Dd,
    Cadd,
    Caec,
    /// `cadd` followed by `caec`.
    Combo,
}

impl Pass {
    pub fn parse(s: &str) -> Result<Pass> {
        Ok(match s.trim() {
            "stratify" => Pass::Stratify,
            "schedule" => Pass::Schedule,
            "twirl" => Pass::Twirl,
            "dd" => Pass::Dd,
            "cadd" | "ca-dd" => Pass::Cadd,
            "caec" | "ca-ec" => Pass::Caec,
            "combo" => Pass::Combo,
            other => return Err(Error::Config(format!("unknown pass '{other}'"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Pass::Stratify => "stratify",
            Pass::Schedule => "schedule",
            Pass::Twirl => "twirl",
            Pass::Dd => "dd",
            Pass::Cadd => "cadd",
            Pass::Caec => "caec",
            Pass::Combo => "combo",
        }
    }

    fn needs_schedule(self) -> bool {
        matches!(self, Pass::Dd | Pass::Cadd | Pass::Caec | Pass::Combo)
    }
}

/// Validated, ordered pass list. Stratification is implicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PassList(Vec<Pass>);

impl PassList {
    pub fn new(passes: Vec<Pass>) -> Result<Self> {
        let pos = |p: Pass| passes.iter().position(|&x| x == p);
        for (i, p) in passes.iter().enumerate() {
            if passes[..i].contains(p) {
                return Err(Error::Config(format!("pass '{}' listed twice", p.name())));
            }
        }
        if let Some(i) = pos(Pass::Stratify) {
            if i != 0 {
                return Err(Error::Config("stratify must come first".into()));
            }
        }
        let sched = pos(Pass::Schedule);
        for (i, p) in passes.iter().enumerate() {
            if p.needs_schedule() && sched.is_none_or(|s| s > i) {
                return Err(Error::Config(format!("pass '{}' must follow schedule", p.name())));
            }
        }
        if let Some(t) = pos(Pass::Twirl) {
            for p in [Pass::Caec, Pass::Combo] {
                if pos(p).is_some_and(|c| c < t) {
                    return Err(Error::Config(format!("twirl must precede '{}'", p.name())));
                }
            }
        }
        let dd_like = [Pass::Dd, Pass::Cadd, Pass::Combo].iter().filter(|p| pos(**p).is_some()).count();
        if dd_like > 1 {
            return Err(Error::Config("at most one of dd, cadd, combo".into()));
        }
        if pos(Pass::Combo).is_some() && pos(Pass::Caec).is_some() {
            return Err(Error::Config("combo already includes caec".into()));
        }
        Ok(PassList(passes))
    }

    /// Comma-separated pass names.
    pub fn parse(s: &str) -> Result<Self> {
        let passes = s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(Pass::parse)
            .collect::<Result<Vec<_>>>()?;
        PassList::new(passes)
    }

    /// Named pipelines: bare, dd, ca-dd, ca-ec, combo. `twirl` adds Pauli twirling.
    pub fn named(name: &str, twirl: bool) -> Result<Self> {
        let mut v = vec![Pass::Schedule];
        if twirl {
            v.push(Pass::Twirl);
        }
        match name {
            "bare" => {}
            "dd" => v.push(Pass::Dd),
            "ca-dd" => v.push(Pass::Cadd),
            "ca-ec" => v.push(Pass::Caec),
            "combo" => v.push(Pass::Combo),
            other => return Err(Error::Config(format!("unknown pipeline '{other}'"))),
        }
        PassList::new(v)
    }

    pub fn passes(&self) -> &[Pass] {
        &self.0
    }

    pub fn contains(&self, p: Pass) -> bool {
        self.0.contains(&p)
    }
}

impl fmt::Display for PassList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|p| p.name()).collect();
        write!(f, "{}", names.join(","))
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CompileOptions {
    /// Decoupling pulse width; `None` uses the device X duration.
    pub pulse_ns: Option<f64>,
    /// Feedforward latency assumed by dynamic compensation; `None` uses the device value.
    pub feedforward_estimate_ns: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompileOutput {
    pub circuit: ScheduledCircuit,
    pub twirl_records: Vec<TwirlRecord>,
    pub dd: Option<DdReport>,
    pub compensation: Option<CompensationReport>,
}

fn has_feedforward(c: &ScheduledCircuit) -> bool {
    c.layers.iter().flat_map(|l| l.ops()).any(|i| matches!(i.gate, Gate::Conditional { .. }))
}

/// Runs the passes on an unstratified circuit. `seed` feeds the twirl.
pub fn compile(circuit: &Circuit, device: &DeviceModel, passes: &PassList, seed: u64, opts: &CompileOptions) -> Result<CompileOutput> {
    if device.num_qubits < circuit.num_qubits {
        return Err(Error::InvalidDevice(format!(
            "device has {} qubits, circuit needs {}",
            device.num_qubits, circuit.num_qubits
        )));
    }
    let mut c = stratify(circuit)?;
    if passes.contains(Pass::Twirl) {
        c = ensure_boundary_layers(&c);
    }
    compile_stratified(c, device, passes, seed, opts)
}

/// Runs the passes on an already stratified (possibly scheduled) circuit.
pub fn compile_stratified(
    mut c: ScheduledCircuit,
    device: &DeviceModel,
    passes: &PassList,
    seed: u64,
    opts: &CompileOptions,
) -> Result<CompileOutput> {
    let mut out = CompileOutput { circuit: ScheduledCircuit::new(c.num_qubits), twirl_records: Vec::new(), dd: None, compensation: None };
    let pulse_ns = match opts.pulse_ns {
        Some(p) => p,
        None => device.x_ns()?,
    };
    let dd_opts = |aligned| DdOptions { pulse_ns, d_min: default_d_min(pulse_ns), aligned };
    let graph = build_interaction_graph(device);
    let caec = |c: &ScheduledCircuit| {
        if has_feedforward(c) {
            compensate_dynamic(c, device, opts.feedforward_estimate_ns)
        } else {
            compensate(c, device)
        }
    };
    for &p in passes.passes() {
        match p {
            Pass::Stratify => {}
            Pass::Schedule => c = schedule(&c, device)?,
            Pass::Twirl => {
                let (t, recs) = pauli_twirl(&c, seed)?;
                c = t;
                out.twirl_records = recs;
            }
            Pass::Dd | Pass::Cadd => {
                let (d, rep) = context_aware_dd(&c, &graph, &dd_opts(p == Pass::Dd))?;
                c = d;
                out.dd = Some(rep);
            }
            Pass::Caec => {
                let (e, rep) = caec(&c)?;
                c = e;
                out.compensation = Some(rep);
            }
            Pass::Combo => {
                let (d, rep) = context_aware_dd(&c, &graph, &dd_opts(false))?;
                out.dd = Some(rep);
                let (e, rep) = caec(&d)?;
                c = e;
                out.compensation = Some(rep);
            }
        }
    }
    out.circuit = c;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_rules() {
        assert!(PassList::parse("schedule,twirl,caec").is_ok());
        assert!(PassList::parse("caec,schedule").is_err());
        assert!(PassList::parse("schedule,caec,twirl").is_err());
        assert!(PassList::parse("cadd").is_err());
        assert!(PassList::parse("schedule,schedule").is_err());
        assert!(PassList::parse("schedule,frobnicate").is_err());
        assert!(PassList::parse("schedule,combo,caec").is_err());
        assert_eq!(PassList::parse("stratify,schedule,cadd").unwrap().to_string(), "stratify,schedule,cadd");
        for n in ["bare", "dd", "ca-dd", "ca-ec", "combo"] {
            assert!(PassList::named(n, true).is_ok());
        }
    }

    #[test]
    fn empty_circuit_compiles() {
        let dev = DeviceModel::line(2, 1e5);
        let p = PassList::parse("schedule,twirl,combo").unwrap();
        let out = compile(&Circuit::new(2), &dev, &p, 1, &CompileOptions::default()).unwrap();
        assert_eq!(out.circuit.makespan(), 0.0);
    }

    #[test]
    fn twirled_combo_is_exact_under_coherent_noise() {
        use crate::sim::{noisy_unitary, unitary_oracle, NoiseModel};
        let dev = DeviceModel::line(4, 1e5);
        let mut c = Circuit::new(4);
        c.push(Gate::SX, &[0]).push(Gate::Ecr, &[1, 0]).push(Gate::Ecr, &[2, 3]);
        c.push(Gate::SX, &[1]).push(Gate::Cnot, &[1, 2]).push(Gate::SX, &[3]);
        let bare = compile(&c, &dev, &PassList::named("bare", false).unwrap(), 0, &CompileOptions::default()).unwrap();
        let ideal = unitary_oracle(&bare.circuit).unwrap();
        for seed in 0..5 {
            let out = compile(&c, &dev, &PassList::named("combo", true).unwrap(), seed, &CompileOptions::default()).unwrap();
            let u = noisy_unitary(&out.circuit, &NoiseModel::coherent(&dev)).unwrap();
            assert!(1.0 - u.phase_fidelity(&ideal) < 1e-10);
        }
    }
}

//! Application benchmarks built on the passes and the simulator.
//!
//! Each benchmark emits plot-ready rows `(d, label, value)` and a summary
//! object; both are deterministic for a given device and seed.

mod circuits;
mod runners;

pub use circuits::*;
pub use runners::*;

use crate::device::DeviceModel;
use crate::error::{Error, Result};
use crate::pipeline::PassList;
use crate::sim::{ramsey_fidelity, NoiseFlags, RamseyCase, RamseyConfig, Suppression};
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchmarkName {
    Ramsey,
    WalshNnn,
    Ising,
    Heisenberg,
    LayerFidelity,
    BellDynamic,
    Combo,
}

impl BenchmarkName {
    pub const ALL: [BenchmarkName; 7] = [
        BenchmarkName::Ramsey,
        BenchmarkName::WalshNnn,
        BenchmarkName::Ising,
        BenchmarkName::Heisenberg,
        BenchmarkName::LayerFidelity,
        BenchmarkName::BellDynamic,
        BenchmarkName::Combo,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown benchmark '{s}'")))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BenchmarkName::Ramsey => "ramsey",
            BenchmarkName::WalshNnn => "walsh-nnn",
            BenchmarkName::Ising => "ising",
            BenchmarkName::Heisenberg => "heisenberg",
            BenchmarkName::LayerFidelity => "layer-fidelity",
            BenchmarkName::BellDynamic => "bell-dynamic",
            BenchmarkName::Combo => "combo",
        }
    }

    pub fn fixture_device(self) -> DeviceModel {
        match self {
            BenchmarkName::Ramsey => DeviceModel::line(4, 5e4),
            BenchmarkName::WalshNnn => triangle_device(),
            BenchmarkName::Ising => ising_device(),
            BenchmarkName::Heisenberg => heisenberg_device(),
            BenchmarkName::LayerFidelity => layer_fidelity_device(),
            BenchmarkName::BellDynamic => bell_device(),
            BenchmarkName::Combo => combo_device(),
        }
    }

    fn default_pipelines(self) -> Vec<String> {
        let v: &[&str] = match self {
            BenchmarkName::Ramsey => &["bare", "dd", "ca-dd", "ca-ec", "combo"],
            BenchmarkName::Ising => &["bare", "ca-dd", "ca-ec"],
            BenchmarkName::Heisenberg | BenchmarkName::LayerFidelity => &["bare", "dd", "ca-dd", "ca-ec"],
            BenchmarkName::Combo => &["bare", "ca-dd", "ca-ec", "combo"],
            BenchmarkName::WalshNnn | BenchmarkName::BellDynamic => &["ca-ec"],
        };
        v.iter().map(|s| s.to_string()).collect()
    }

    fn default_depths(self) -> Vec<usize> {
        match self {
            BenchmarkName::Ramsey => (0..=10).collect(),
            BenchmarkName::Ising => (0..=10).collect(),
            BenchmarkName::Heisenberg => (1..=8).collect(),
            BenchmarkName::LayerFidelity => vec![1, 2, 4, 8],
            BenchmarkName::Combo => (1..=6).collect(),
            BenchmarkName::WalshNnn | BenchmarkName::BellDynamic => vec![],
        }
    }
}

/// Trotter couplings and step for the Heisenberg benchmark (non-Clifford angles).
pub const HEISENBERG_J: [f64; 3] = [1.0, 1.0, 1.0];
pub const HEISENBERG_T: f64 = 0.35;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkSpec {
    pub name: BenchmarkName,
    pub device: DeviceModel,
    pub pipelines: Vec<String>,
    pub depths: Vec<usize>,
    pub seed: u64,
    pub n_twirls: usize,
    /// Feedforward estimates (bell-dynamic) or idle lengths (walsh-nnn), ns.
    pub tau_sweep: Vec<f64>,
    pub flags: NoiseFlags,
}

impl BenchmarkSpec {
    /// Fixture device and defaults for a named benchmark.
    pub fn new(name: BenchmarkName) -> Self {
        let tau_sweep = match name {
            BenchmarkName::BellDynamic => (0..=40).map(|i| i as f64 * 50.0).collect(),
            BenchmarkName::WalshNnn => (1..=8).map(|i| i as f64 * 250.0).collect(),
            _ => vec![500.0],
        };
        BenchmarkSpec {
            name,
            device: name.fixture_device(),
            pipelines: name.default_pipelines(),
            depths: name.default_depths(),
            seed: 0,
            n_twirls: 8,
            tau_sweep,
            flags: NoiseFlags::ALL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depths.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("depths must be increasing".into()));
        }
        let needs_depths = !matches!(self.name, BenchmarkName::WalshNnn | BenchmarkName::BellDynamic);
        if needs_depths && self.depths.is_empty() {
            return Err(Error::Config("depths must be non-empty".into()));
        }
        if self.name == BenchmarkName::LayerFidelity && self.depths.len() < 2 {
            return Err(Error::Config("layer fidelity needs at least two depths".into()));
        }
        for p in &self.pipelines {
            PassList::named(p, false)?;
        }
        Ok(())
    }
}

/// One plot point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub d: f64,
    pub label: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchmarkOutput {
    pub name: BenchmarkName,
    pub rows: Vec<CurveRow>,
    pub summary: Value,
}

impl BenchmarkOutput {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("d,label,value\n");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{}", r.d, r.label, r.value);
        }
        s
    }

    /// Values of one label in row order.
    pub fn series(&self, label: &str) -> Vec<f64> {
        self.rows.iter().filter(|r| r.label == label).map(|r| r.value).collect()
    }
}

fn push_series(rows: &mut Vec<CurveRow>, xs: impl IntoIterator<Item = f64>, label: &str, ys: &[f64]) {
    for (x, &y) in xs.into_iter().zip(ys) {
        rows.push(CurveRow { d: x, label: label.to_string(), value: y });
    }
}

fn suppression(p: &str) -> Result<Suppression> {
    Ok(match p {
        "bare" => Suppression::None,
        "dd" => Suppression::AlignedDd,
        "ca-dd" => Suppression::CaDd,
        "ca-ec" => Suppression::CaEc,
        "combo" => Suppression::Combo,
        other => return Err(Error::Config(format!("unknown pipeline '{other}'"))),
    })
}

fn case_label(c: RamseyCase) -> &'static str {
    match c {
        RamseyCase::SingleIdle => "single-idle",
        RamseyCase::JointIdle => "joint-idle",
        RamseyCase::ControlSpectator => "control-spectator",
        RamseyCase::TargetSpectator => "target-spectator",
        RamseyCase::ControlControl => "control-control",
    }
}

pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<BenchmarkOutput> {
    spec.validate()?;
    let dev = &spec.device;
    let depths_f = || spec.depths.iter().map(|&d| d as f64);
    let pipes: Vec<&str> = spec.pipelines.iter().map(|s| s.as_str()).collect();
    let mut rows = Vec::new();
    let summary = match spec.name {
        BenchmarkName::Ramsey => {
            let d_max = *spec.depths.last().unwrap_or(&0);
            let tau = spec.tau_sweep.first().copied().unwrap_or(500.0);
            let cases = [
                RamseyCase::JointIdle,
                RamseyCase::ControlSpectator,
                RamseyCase::TargetSpectator,
                RamseyCase::ControlControl,
            ];
            let mut final_values = serde_json::Map::new();
            for case in cases {
                for &p in &pipes {
                    let cfg = RamseyConfig { case, suppression: suppression(p)?, tau_ns: tau, d_max, pulse_ns: None };
                    let f = ramsey_fidelity(&cfg, dev, spec.flags)?;
                    let ys: Vec<f64> = spec.depths.iter().map(|&d| f[d]).collect();
                    let label = format!("{}/{}", case_label(case), p);
                    push_series(&mut rows, depths_f(), &label, &ys);
                    final_values.insert(label, json!(ys.last()));
                }
            }
            json!({ "final_fidelity": final_values })
        }
        BenchmarkName::WalshNnn => {
            let r = bench_walsh_nnn(&spec.tau_sweep, dev)?;
            let two: Vec<f64> = r.iter().map(|x| x.two_color).collect();
            let three: Vec<f64> = r.iter().map(|x| x.three_color).collect();
            push_series(&mut rows, spec.tau_sweep.iter().copied(), "two-color", &two);
            push_series(&mut rows, spec.tau_sweep.iter().copied(), "three-color", &three);
            json!({ "rows": r })
        }
        BenchmarkName::Ising => {
            let mut fin = serde_json::Map::new();
            for &p in &pipes {
                let v = bench_ising(&spec.depths, &PassList::named(p, true)?, dev, spec.flags, spec.n_twirls, spec.seed)?;
                let min_abs = v.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
                push_series(&mut rows, depths_f(), p, &v);
                fin.insert(p.to_string(), json!({ "min_abs_xx": min_abs }));
            }
            let ideal = bench_ising(&spec.depths, &PassList::named("bare", false)?, dev, NoiseFlags::NONE, 1, spec.seed)?;
            push_series(&mut rows, depths_f(), "ideal", &ideal);
            Value::Object(fin)
        }
        BenchmarkName::Heisenberg => {
            let r = heisenberg_report(&spec.depths, HEISENBERG_J, HEISENBERG_T, &pipes, dev, spec.flags, spec.n_twirls, spec.seed)?;
            push_series(&mut rows, depths_f(), "ideal", &r.ideal);
            for c in &r.curves {
                push_series(&mut rows, depths_f(), &c.pipeline, &c.measured);
            }
            serde_json::to_value(&r)?
        }
        BenchmarkName::LayerFidelity => {
            let t = bench_layer_fidelity(&layer_fidelity_layer(), &pipes, dev, spec.flags, &spec.depths, spec.n_twirls, spec.seed)?;
            for r in &t.rows {
                rows.push(CurveRow { d: 1.0, label: format!("lf/{}", r.pipeline), value: r.lf });
                rows.push(CurveRow { d: 1.0, label: format!("gamma/{}", r.pipeline), value: r.gamma });
            }
            serde_json::to_value(&t)?
        }
        BenchmarkName::BellDynamic => {
            let r = bench_bell_dynamic(&spec.tau_sweep, dev, spec.flags)?;
            push_series(&mut rows, r.tau_ns.iter().copied(), "ca-ec", &r.fidelity);
            serde_json::to_value(&r)?
        }
        BenchmarkName::Combo => {
            let r = bench_combo(&spec.depths, &pipes, dev, spec.flags)?;
            for (p, v) in &r {
                push_series(&mut rows, depths_f(), p, v);
            }
            json!({ "pipelines": r.iter().map(|(p, v)| json!({ "pipeline": p, "p00": v })).collect::<Vec<_>>() })
        }
    };
    Ok(BenchmarkOutput { name: spec.name, rows, summary })
}

use super::circuits::*;
use crate::circuit::Circuit;
use crate::device::DeviceModel;
use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::pipeline::{compile, CompileOptions, PassList};
use crate::seed::derive_path;
use crate::sim::{
    depolarization_overhead_fit, layer_fidelity, mitigation_overhead, overhead_ratio, simulate, DepolarizationFit,
    LayerFidelity, LayerFidelityConfig, Mode, NoiseFlags, NoiseModel,
};
use rayon::prelude::*;
use serde::Serialize;

fn run_exact(c: &Circuit, device: &DeviceModel, passes: &PassList, seed: u64, noise: &NoiseModel) -> Result<crate::sim::SimResult> {
    let out = compile(c, device, passes, seed, &CompileOptions::default())?;
    simulate(&out.circuit, noise, Mode::Exact)
}

/// Expectation of `obs` per depth, averaged over `n_twirls` twirl instances
/// when the pipeline twirls.
fn twirl_averaged(
    depths: &[usize],
    build: impl Fn(usize) -> Circuit + Sync,
    obs: &PauliString,
    passes: &PassList,
    device: &DeviceModel,
    flags: NoiseFlags,
    n_twirls: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let noise = NoiseModel::from_device(device, flags);
    let reps = if passes.contains(crate::pipeline::Pass::Twirl) { n_twirls.max(1) } else { 1 };
    let jobs: Vec<(usize, usize)> = depths.iter().flat_map(|&d| (0..reps).map(move |t| (d, t))).collect();
    let vals = jobs
        .par_iter()
        .map(|&(d, t)| {
            let r = run_exact(&build(d), device, passes, derive_path(seed, &[d as u64, t as u64]), &noise)?;
            Ok(r.expectation(obs))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(vals.chunks(reps).map(|c| c.iter().sum::<f64>() / reps as f64).collect())
}

/// `<X0 X5>` per depth.
pub fn bench_ising(depths: &[usize], passes: &PassList, device: &DeviceModel, flags: NoiseFlags, n_twirls: usize, seed: u64) -> Result<Vec<f64>> {
    let obs = PauliString::parse("XIIIIX")?;
    twirl_averaged(depths, ising_circuit, &obs, passes, device, flags, n_twirls, seed)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeisenbergCurve {
    pub pipeline: String,
    pub depths: Vec<usize>,
    pub measured: Vec<f64>,
    pub fit: DepolarizationFit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeisenbergReport {
    pub ideal: Vec<f64>,
    pub curves: Vec<HeisenbergCurve>,
    /// `(a, b, overhead_a / overhead_b)` at the deepest depth.
    pub ratios: Vec<(String, String, f64)>,
}

/// `<Z2>` per depth for one pipeline.
#[allow(clippy::too_many_arguments)]
pub fn bench_heisenberg(
    depths: &[usize],
    j: [f64; 3],
    t: f64,
    passes: &PassList,
    device: &DeviceModel,
    flags: NoiseFlags,
    n_twirls: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let obs = PauliString::parse("IIZIIIIIIIII")?;
    twirl_averaged(depths, |d| heisenberg_circuit(d, j, t), &obs, passes, device, flags, n_twirls, seed)
}

/// Twirled Heisenberg curves for several pipelines with depolarizing-model
/// overheads.
#[allow(clippy::too_many_arguments)]
pub fn heisenberg_report(
    depths: &[usize],
    j: [f64; 3],
    t: f64,
    pipelines: &[&str],
    device: &DeviceModel,
    flags: NoiseFlags,
    n_twirls: usize,
    seed: u64,
) -> Result<HeisenbergReport> {
    let ideal = bench_heisenberg(depths, j, t, &PassList::named("bare", false)?, device, NoiseFlags::NONE, 1, seed)?;
    let df: Vec<f64> = depths.iter().map(|&d| d as f64).collect();
    let mut curves = Vec::new();
    for &p in pipelines {
        let measured = bench_heisenberg(depths, j, t, &PassList::named(p, true)?, device, flags, n_twirls, seed)?;
        let fit = depolarization_overhead_fit(&df, &measured, &ideal)?;
        curves.push(HeisenbergCurve { pipeline: p.to_string(), depths: depths.to_vec(), measured, fit });
    }
    let mut ratios = Vec::new();
    for a in &curves {
        for b in &curves {
            if a.pipeline != b.pipeline {
                let last = |c: &HeisenbergCurve| *c.fit.overhead.last().unwrap_or(&1.0);
                ratios.push((a.pipeline.clone(), b.pipeline.clone(), last(a) / last(b)));
            }
        }
    }
    Ok(HeisenbergReport { ideal, curves, ratios })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayerFidelityRow {
    pub pipeline: String,
    pub lf: f64,
    pub gamma: f64,
    pub detail: LayerFidelity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayerFidelityTable {
    pub rows: Vec<LayerFidelityRow>,
    /// `(a, b, depth, (gamma_a / gamma_b)^depth)` for depths 1 and 10.
    pub ratios: Vec<(String, String, u32, f64)>,
}

pub fn bench_layer_fidelity(
    layer: &Circuit,
    pipelines: &[&str],
    device: &DeviceModel,
    flags: NoiseFlags,
    depths: &[usize],
    n_twirls: usize,
    seed: u64,
) -> Result<LayerFidelityTable> {
    let mut rows = Vec::new();
    for (i, &p) in pipelines.iter().enumerate() {
        let passes = PassList::named(p, true)?;
        let cfg = LayerFidelityConfig { passes: &passes, depths, n_twirls, seed: derive_path(seed, &[i as u64]), flags };
        let detail = layer_fidelity(layer, device, &cfg)?;
        let gamma = mitigation_overhead(detail.lf)?;
        rows.push(LayerFidelityRow { pipeline: p.to_string(), lf: detail.lf, gamma, detail });
    }
    let mut ratios = Vec::new();
    for a in &rows {
        for b in &rows {
            if a.pipeline != b.pipeline {
                for d in [1, 10] {
                    ratios.push((a.pipeline.clone(), b.pipeline.clone(), d, overhead_ratio(a.gamma, b.gamma, d)));
                }
            }
        }
    }
    Ok(LayerFidelityTable { rows, ratios })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BellCurve {
    /// Swept feedforward estimates (ns).
    pub tau_ns: Vec<f64>,
    pub fidelity: Vec<f64>,
    /// Fidelity without any compensation.
    pub uncompensated: f64,
    pub best_tau_ns: f64,
}

/// Bell-pair fidelity of the dynamic circuit when compensation assumes each
/// feedforward latency in `taus`.
pub fn bench_bell_dynamic(taus: &[f64], device: &DeviceModel, flags: NoiseFlags) -> Result<BellCurve> {
    if taus.is_empty() {
        return Err(Error::Config("empty tau sweep".into()));
    }
    let noise = NoiseModel::from_device(device, flags);
    let c = bell_dynamic_circuit();
    let bare = run_exact(&c, device, &PassList::named("bare", false)?, 0, &noise)?.prob_bits(&[1, 2], &[0, 0]);
    let passes = PassList::named("ca-ec", false)?;
    let fidelity = taus
        .par_iter()
        .map(|&tau| {
            let opts = CompileOptions { feedforward_estimate_ns: Some(tau), ..CompileOptions::default() };
            let out = compile(&c, device, &passes, 0, &opts)?;
            Ok(simulate(&out.circuit, &noise, Mode::Exact)?.prob_bits(&[1, 2], &[0, 0]))
        })
        .collect::<Result<Vec<f64>>>()?;
    let best = fidelity
        .iter()
        .enumerate()
        .fold(0, |b, (i, f)| if *f > fidelity[b] + 1e-12 { i } else { b });
    Ok(BellCurve { tau_ns: taus.to_vec(), best_tau_ns: taus[best], fidelity, uncompensated: bare })
}

/// `P00` on qubits (1, 2) per depth for each pipeline.
pub fn bench_combo(depths: &[usize], pipelines: &[&str], device: &DeviceModel, flags: NoiseFlags) -> Result<Vec<(String, Vec<f64>)>> {
    let noise = NoiseModel::from_device(device, flags);
    pipelines
        .iter()
        .map(|&p| {
            let passes = PassList::named(p, false)?;
            let v = depths
                .par_iter()
                .map(|&d| Ok(run_exact(&combo_circuit(d), device, &passes, 0, &noise)?.prob_bits(&[1, 2], &[0, 0])))
                .collect::<Result<Vec<f64>>>()?;
            Ok((p.to_string(), v))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalshNnnRow {
    pub tau_ns: f64,
    pub two_color: f64,
    pub three_color: f64,
}

/// Joint idle of the triangle device filled with colors (1, 2, 1) versus
/// (1, 2, 3); process fidelity of the net error against the identity.
pub fn bench_walsh_nnn(taus: &[f64], device: &DeviceModel) -> Result<Vec<WalshNnnRow>> {
    use crate::cadd::{apply_dd, collect_joint_delays, Coloring};
    use crate::circuit::Gate;
    use crate::device::build_interaction_graph;
    use crate::schedule::schedule;
    use crate::sim::{noisy_unitary, unitary_oracle};
    use crate::stratify::stratify;
    let graph = build_interaction_graph(device);
    let noise = NoiseModel::coherent(device);
    taus.iter()
        .map(|&tau| {
            let mut c = Circuit::new(3);
            for q in 0..3 {
                c.push(Gate::Delay(tau), &[q]);
            }
            let s = schedule(&stratify(&c)?, device)?;
            let intervals = collect_joint_delays(&s, &graph, 0.0);
            let fid = |colors: [usize; 3]| -> Result<f64> {
                let cols: Vec<Coloring> = intervals
                    .iter()
                    .enumerate()
                    .map(|(i, iv)| Coloring {
                        interval: i,
                        colors: iv.qubits.iter().map(|&q| (q, colors[q])).collect(),
                        precolored: Default::default(),
                    })
                    .collect();
                let (dd, _) = apply_dd(&s, &intervals, &cols, 0.0)?;
                Ok(noisy_unitary(&dd, &noise)?.phase_fidelity(&unitary_oracle(&s)?).powi(2))
            };
            Ok(WalshNnnRow { tau_ns: tau, two_color: fid([1, 2, 1])?, three_color: fid([1, 2, 3])? })
        })
        .collect()
}

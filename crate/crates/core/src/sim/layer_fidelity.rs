//! Layer fidelity of a single layer of two-qubit Clifford gates.
//!
//! Every partition (gate pair, adjacent idle pair, lone idle qubit) is
//! prepared in an eigenstate of one of its Pauli operators, the layer is
//! repeated `d` times with fresh twirls, and the expectation of the ideally
//! propagated Pauli is read out. Decays are fitted per Pauli; the process
//! fidelity of a partition is the average Pauli fidelity including identity.

use super::analysis::fit_exponential;
use super::state::simulate_from;
use super::{Mode, NoiseFlags, NoiseModel, StateVector};
use crate::circuit::{Circuit, Gate};
use crate::device::{build_interaction_graph, DeviceModel};
use crate::error::{Error, Result};
use crate::math::{c, C64};
use crate::pauli::{Pauli, PauliString};
use crate::pipeline::{compile, CompileOptions, PassList};
use crate::seed::derive_path;
use crate::twirl::twirl_sandwich;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionKind {
    Gate,
    IdlePair,
    Idle,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Partition {
    pub qubits: Vec<usize>,
    pub kind: PartitionKind,
    /// The gate for `Gate` partitions.
    #[serde(skip)]
    pub gate: Option<Gate>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionFidelity {
    pub qubits: Vec<usize>,
    pub kind: PartitionKind,
    pub process_fidelity: f64,
    /// Fitted decay rate per non-identity Pauli.
    pub pauli_fidelities: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayerFidelity {
    pub partitions: Vec<PartitionFidelity>,
    /// Partitions whose fit failed; left out of the product.
    pub excluded: Vec<Vec<usize>>,
    pub lf: f64,
}

/// Splits the qubits of a one-layer circuit into gate pairs, adjacent idle
/// pairs (greedy over the crosstalk edges in order) and lone idle qubits.
pub fn partition_layer(layer: &Circuit, device: &DeviceModel) -> Result<Vec<Partition>> {
    let n = layer.num_qubits;
    let mut used = vec![false; n];
    let mut parts = Vec::new();
    for inst in &layer.instructions {
        if !inst.gate.is_clifford_2q() {
            return Err(Error::InvalidCircuit(format!(
                "layer fidelity expects CNOT/ECR gates only, found `{}`",
                inst.gate.name()
            )));
        }
        for &q in &inst.qubits {
            if used[q] {
                return Err(Error::Overlap { qubit: q, detail: "gates of one layer overlap".into() });
            }
            used[q] = true;
        }
        parts.push(Partition { qubits: inst.qubits.clone(), kind: PartitionKind::Gate, gate: Some(inst.gate.clone()) });
    }
    let g = build_interaction_graph(device);
    for (a, b) in g.edge_pairs() {
        if a < n && b < n && !used[a] && !used[b] {
            used[a] = true;
            used[b] = true;
            parts.push(Partition { qubits: vec![a, b], kind: PartitionKind::IdlePair, gate: None });
        }
    }
    for q in 0..n {
        if !used[q] {
            parts.push(Partition { qubits: vec![q], kind: PartitionKind::Idle, gate: None });
        }
    }
    Ok(parts)
}

fn eigenstate(p: Pauli) -> [C64; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match p {
        Pauli::I | Pauli::Z => [c(1.0, 0.0), c(0.0, 0.0)],
        Pauli::X => [c(h, 0.0), c(h, 0.0)],
        Pauli::Y => [c(h, 0.0), c(0.0, h)],
    }
}

/// Pauli prepared on a partition for preparation index `k` (0..15).
fn pauli_for(part: &Partition, k: usize) -> PauliString {
    match part.qubits.len() {
        2 => PauliString::from_index(2, k + 1),
        _ => PauliString::from_index(1, k % 3 + 1),
    }
}

fn propagate(part: &Partition, p: &PauliString, d: usize) -> Result<PauliString> {
    let mut p = p.clone();
    if let Some(g) = &part.gate {
        for _ in 0..d {
            p = twirl_sandwich(g, &p)?;
        }
    }
    Ok(p)
}

fn embed(n: usize, qubits: &[usize], p: &PauliString) -> PauliString {
    let mut s = PauliString::identity(n);
    for (k, &q) in qubits.iter().enumerate() {
        s.symbols[q] = p.symbols[k];
    }
    s.phase = p.phase;
    s
}

pub struct LayerFidelityConfig<'a> {
    pub passes: &'a PassList,
    pub depths: &'a [usize],
    pub n_twirls: usize,
    pub seed: u64,
    pub flags: NoiseFlags,
}

pub fn layer_fidelity(layer: &Circuit, device: &DeviceModel, cfg: &LayerFidelityConfig) -> Result<LayerFidelity> {
    if cfg.depths.len() < 2 || cfg.depths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("depths must be increasing with at least two entries".into()));
    }
    if cfg.n_twirls == 0 {
        return Err(Error::Config("need at least one twirl".into()));
    }
    let parts = partition_layer(layer, device)?;
    let n = layer.num_qubits;
    let noise = NoiseModel::from_device(device, cfg.flags);
    let preps = if parts.iter().any(|p| p.qubits.len() == 2) { 15 } else { 3 };
    // one job per (preparation, depth, twirl); results come back in job order
    let jobs: Vec<(usize, usize, usize)> = (0..preps)
        .flat_map(|k| (0..cfg.depths.len()).flat_map(move |di| (0..cfg.n_twirls).map(move |t| (k, di, t))))
        .collect();
    let values: Vec<Vec<f64>> = jobs
        .par_iter()
        .map(|&(k, di, t)| -> Result<Vec<f64>> {
            let d = cfg.depths[di];
            let mut c = Circuit::new(n);
            for _ in 0..d {
                c.push(Gate::Barrier, &[]);
                for inst in &layer.instructions {
                    c.push(inst.gate.clone(), &inst.qubits);
                }
            }
            let seed = derive_path(cfg.seed, &[di as u64, t as u64]);
            let out = compile(&c, device, cfg.passes, seed, &CompileOptions::default())?;
            let mut local = vec![Pauli::I; n];
            for part in &parts {
                let p = pauli_for(part, k);
                for (i, &q) in part.qubits.iter().enumerate() {
                    local[q] = p.symbols[i];
                }
            }
            let init = StateVector::product(&local.iter().map(|&p| eigenstate(p)).collect::<Vec<_>>());
            let r = simulate_from(&out.circuit, &noise, Mode::Exact, init)?;
            parts
                .iter()
                .map(|part| {
                    let target = propagate(part, &pauli_for(part, k), d)?;
                    Ok(r.expectation(&embed(n, &part.qubits, &target)))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let depths_f: Vec<f64> = cfg.depths.iter().map(|&d| d as f64).collect();
    let mut out = LayerFidelity { partitions: Vec::new(), excluded: Vec::new(), lf: 1.0 };
    for (pi, part) in parts.iter().enumerate() {
        let kmax = if part.qubits.len() == 2 { 15 } else { 3 };
        let mut fids = Vec::new();
        let mut failed = false;
        for k in 0..kmax {
            let means: Vec<f64> = (0..cfg.depths.len())
                .map(|di| {
                    let base = (k * cfg.depths.len() + di) * cfg.n_twirls;
                    (0..cfg.n_twirls).map(|t| values[base + t][pi]).sum::<f64>() / cfg.n_twirls as f64
                })
                .collect();
            match fit_exponential(&depths_f, &means) {
                Ok(f) if f.p <= 1.0 + 1e-6 => fids.push((pauli_for(part, k).to_string(), f.p.min(1.0))),
                Ok(f) => {
                    log::warn!("partition {:?}: decay rate {} above one", part.qubits, f.p);
                    failed = true;
                }
                Err(e) => {
                    log::warn!("partition {:?}: {e}", part.qubits);
                    failed = true;
                }
            }
        }
        if failed {
            out.excluded.push(part.qubits.clone());
            continue;
        }
        let dim2 = (1usize << (2 * part.qubits.len())) as f64;
        let pf = (1.0 + fids.iter().map(|(_, f)| f).sum::<f64>()) / dim2;
        out.lf *= pf;
        out.partitions.push(PartitionFidelity { qubits: part.qubits.clone(), kind: part.kind, process_fidelity: pf, pauli_fidelities: fids });
    }
    Ok(out)
}

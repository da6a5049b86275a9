//! Device description and the crosstalk graph derived from it.

use crate::circuit::Gate;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingKind {
    NearestNeighbor,
    NextNearestNeighbor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub q0: usize,
    pub q1: usize,
    pub zz_hz: f64,
    #[serde(default = "default_kind")]
    pub kind: CouplingKind,
}

fn default_kind() -> CouplingKind {
    CouplingKind::NearestNeighbor
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarkTerm {
    /// (control, target) of the gate whose drive shifts the spectator.
    pub driven_pair: (usize, usize),
    pub spectator: usize,
    pub shift_hz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeParity {
    pub qubit: usize,
    pub delta_hz: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Durations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ecr_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sx_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure_ns: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedforward_ns: Option<f64>,
    /// Defaults to three ECR durations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ucan_ns: Option<f64>,
    /// Duration of an inserted correction RZZ; defaults to 100 ns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rzz_ns: Option<f64>,
    /// Defaults to the ECR duration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cnot_ns: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviceModel {
    pub num_qubits: usize,
    #[serde(default)]
    pub couplings: Vec<Coupling>,
    #[serde(default)]
    pub stark_terms: Vec<StarkTerm>,
    #[serde(default)]
    pub charge_parity: Vec<ChargeParity>,
    #[serde(default)]
    pub durations: Durations,
}

pub const DEFAULT_RZZ_NS: f64 = 100.0;

impl Durations {
    /// Fixture durations: ECR 500 ns, X/SX 35 ns, measurement 4 µs, feedforward 1.15 µs.
    pub fn fixture() -> Self {
        Durations {
            ecr_ns: Some(500.0),
            x_ns: Some(35.0),
            sx_ns: Some(35.0),
            measure_ns: Some(4000.0),
            feedforward_ns: Some(1150.0),
            ucan_ns: None,
            rzz_ns: None,
            cnot_ns: None,
        }
    }
}

fn need(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| Error::MissingDuration(name.to_string()))
}

impl DeviceModel {
    pub fn new(num_qubits: usize) -> Self {
        DeviceModel {
            num_qubits,
            couplings: Vec::new(),
            stark_terms: Vec::new(),
            charge_parity: Vec::new(),
            durations: Durations::fixture(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn add_coupling(&mut self, q0: usize, q1: usize, zz_hz: f64, kind: CouplingKind) -> &mut Self {
        self.couplings.push(Coupling { q0, q1, zz_hz, kind });
        self
    }

    /// Open chain `0-1-..-(n-1)` with uniform nearest-neighbor ZZ.
    pub fn line(n: usize, zz_hz: f64) -> Self {
        let mut d = DeviceModel::new(n);
        for q in 0..n.saturating_sub(1) {
            d.add_coupling(q, q + 1, zz_hz, CouplingKind::NearestNeighbor);
        }
        d
    }

    pub fn ring(n: usize, zz_hz: f64) -> Self {
        let mut d = DeviceModel::line(n, zz_hz);
        if n > 2 {
            d.add_coupling(n - 1, 0, zz_hz, CouplingKind::NearestNeighbor);
        }
        d
    }

    /// 20-qubit heavy-hex patch: two rows of five-qubit cells joined by bridge qubits.
    pub fn heavy_hex_patch(zz_hz: f64) -> Self {
        let mut d = DeviceModel::new(20);
        // row A: 0..=6, row B: 10..=16, row C: 17..=19 partially; bridges 7,8,9
        let row_a: Vec<usize> = (0..=6).collect();
        let row_b: Vec<usize> = (10..=16).collect();
        for w in row_a.windows(2).chain(row_b.windows(2)) {
            d.add_coupling(w[0], w[1], zz_hz, CouplingKind::NearestNeighbor);
        }
        for (bridge, a, b) in [(7, 0, 10), (8, 3, 13), (9, 6, 16)] {
            d.add_coupling(a, bridge, zz_hz, CouplingKind::NearestNeighbor);
            d.add_coupling(bridge, b, zz_hz, CouplingKind::NearestNeighbor);
        }
        for (bridge, b) in [(17, 11), (18, 14), (19, 15)] {
            d.add_coupling(b, bridge, zz_hz, CouplingKind::NearestNeighbor);
        }
        d
    }

    pub fn ecr_ns(&self) -> Result<f64> {
        need(self.durations.ecr_ns, "ecr_ns")
    }

    pub fn x_ns(&self) -> Result<f64> {
        need(self.durations.x_ns, "x_ns")
    }

    pub fn measure_ns(&self) -> Result<f64> {
        need(self.durations.measure_ns, "measure_ns")
    }

    pub fn feedforward_ns(&self) -> Result<f64> {
        need(self.durations.feedforward_ns, "feedforward_ns")
    }

    pub fn rzz_ns(&self) -> f64 {
        self.durations.rzz_ns.unwrap_or(DEFAULT_RZZ_NS)
    }

    /// Duration the scheduler assigns to `gate`.
    pub fn duration(&self, gate: &Gate) -> Result<f64> {
        let dur = &self.durations;
        Ok(match gate {
            Gate::I | Gate::Z | Gate::RZ(_) | Gate::Barrier => 0.0,
            Gate::X | Gate::Y => need(dur.x_ns, "x_ns")?,
            Gate::SX | Gate::RY(_) | Gate::U1q { .. } => need(dur.sx_ns.or(dur.x_ns), "sx_ns")?,
            Gate::Ecr => need(dur.ecr_ns, "ecr_ns")?,
            Gate::Cnot => need(dur.cnot_ns.or(dur.ecr_ns), "cnot_ns")?,
            Gate::UCan { .. } => match dur.ucan_ns {
                Some(v) => v,
                None => 3.0 * need(dur.ecr_ns, "ecr_ns")?,
            },
            Gate::RZZ(_) => self.rzz_ns(),
            // conditional latency is part of the measurement window
            Gate::Measure { .. } => need(dur.measure_ns, "measure_ns")? + need(dur.feedforward_ns, "feedforward_ns")?,
            Gate::Conditional { gate, .. } => self.duration(gate)?,
            Gate::Delay(d) => *d,
        })
    }

    pub fn delta_hz(&self, q: usize) -> f64 {
        self.charge_parity.iter().filter(|c| c.qubit == q).map(|c| c.delta_hz).sum()
    }

    pub fn without_noise(&self) -> Self {
        let mut d = self.clone();
        d.couplings.clear();
        d.stark_terms.clear();
        d.charge_parity.clear();
        d
    }
}

/// One validation problem; an empty list means the device is usable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub code: &'static str,
    pub message: String,
}

pub fn validate(device: &DeviceModel) -> Vec<Finding> {
    let mut out = Vec::new();
    let n = device.num_qubits;
    let mut push = |code: &'static str, message: String| out.push(Finding { code, message });
    let mut seen = BTreeMap::new();
    for (i, c) in device.couplings.iter().enumerate() {
        for q in [c.q0, c.q1] {
            if q >= n {
                push("index", format!("coupling {i} references qubit {q} on a {n}-qubit device"));
            }
        }
        if c.q0 == c.q1 {
            push("self-loop", format!("coupling {i} joins qubit {} to itself", c.q0));
        }
        if !(c.zz_hz >= 0.0) || !c.zz_hz.is_finite() {
            push("rate", format!("coupling {i} has invalid zz_hz {}", c.zz_hz));
        }
        let key = (c.q0.min(c.q1), c.q0.max(c.q1));
        if let Some(prev) = seen.insert(key, i) {
            push("duplicate", format!("couplings {prev} and {i} both join {:?}", key));
        }
    }
    for (i, s) in device.stark_terms.iter().enumerate() {
        for q in [s.driven_pair.0, s.driven_pair.1, s.spectator] {
            if q >= n {
                push("index", format!("stark term {i} references qubit {q} on a {n}-qubit device"));
            }
        }
        if !s.shift_hz.is_finite() {
            push("rate", format!("stark term {i} has a non-finite shift"));
        }
    }
    for (i, c) in device.charge_parity.iter().enumerate() {
        if c.qubit >= n {
            push("index", format!("charge-parity term {i} references qubit {} on a {n}-qubit device", c.qubit));
        }
        if !c.delta_hz.is_finite() || c.delta_hz < 0.0 {
            push("rate", format!("charge-parity term {i} has invalid delta_hz"));
        }
    }
    let d = &device.durations;
    for (name, v) in [
        ("ecr_ns", d.ecr_ns),
        ("x_ns", d.x_ns),
        ("sx_ns", d.sx_ns),
        ("measure_ns", d.measure_ns),
        ("feedforward_ns", d.feedforward_ns),
    ] {
        match v {
            None => push("missing-duration", format!("durations.{name} is missing")),
            Some(x) if !(x >= 0.0) => push("duration", format!("durations.{name} must be non-negative")),
            _ => {}
        }
    }
    if let Some(m) = d.measure_ns {
        if !(m > 0.0) {
            push("duration", "durations.measure_ns must be positive".into());
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct GraphEdge {
    pub a: usize,
    pub b: usize,
    pub zz_hz: f64,
    pub kind: CouplingKind,
}

/// Undirected crosstalk graph with edges sorted by `(a, b)`, `a < b`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrosstalkGraph {
    pub num_nodes: usize,
    pub edges: Vec<GraphEdge>,
    adjacency: Vec<Vec<usize>>,
}

impl CrosstalkGraph {
    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency.get(a).is_some_and(|n| n.contains(&b))
    }

    pub fn rate(&self, a: usize, b: usize) -> f64 {
        let key = (a.min(b), a.max(b));
        self.edges
            .iter()
            .find(|e| (e.a, e.b) == key)
            .map(|e| e.zz_hz)
            .unwrap_or(0.0)
    }

    pub fn edge_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().map(|e| (e.a, e.b))
    }
}

pub fn build_interaction_graph(device: &DeviceModel) -> CrosstalkGraph {
    build_interaction_graph_with_floor(device, 0.0)
}

/// Keeps couplings with `zz_hz > floor`. Duplicate pairs keep their largest rate.
pub fn build_interaction_graph_with_floor(device: &DeviceModel, floor: f64) -> CrosstalkGraph {
    let mut merged: BTreeMap<(usize, usize), (f64, CouplingKind)> = BTreeMap::new();
    for c in &device.couplings {
        if c.q0 == c.q1 || c.q0 >= device.num_qubits || c.q1 >= device.num_qubits {
            continue;
        }
        if !(c.zz_hz > floor) {
            log::debug!("coupling ({}, {}) at {} Hz below floor {floor}", c.q0, c.q1, c.zz_hz);
            continue;
        }
        let key = (c.q0.min(c.q1), c.q0.max(c.q1));
        let entry = merged.entry(key).or_insert((c.zz_hz, c.kind));
        if c.zz_hz > entry.0 || (c.zz_hz == entry.0 && c.kind < entry.1) {
            *entry = (c.zz_hz, c.kind);
        }
    }
    let mut adjacency = vec![Vec::new(); device.num_qubits];
    let edges: Vec<GraphEdge> = merged
        .into_iter()
        .map(|((a, b), (zz_hz, kind))| {
            adjacency[a].push(b);
            adjacency[b].push(a);
            GraphEdge { a, b, zz_hz, kind }
        })
        .collect();
    for n in &mut adjacency {
        n.sort_unstable();
    }
    CrosstalkGraph { num_nodes: device.num_qubits, edges, adjacency }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_triangle_ring() {
        let g = build_interaction_graph(&DeviceModel::line(3, 5e4));
        assert_eq!(g.edge_pairs().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        let mut d = DeviceModel::line(3, 5e4);
        d.add_coupling(0, 2, 1e4, CouplingKind::NextNearestNeighbor);
        let g = build_interaction_graph(&d);
        assert_eq!(g.edges.len(), 3);
        assert!(g.has_edge(2, 0));
        let g = build_interaction_graph(&DeviceModel::ring(12, 5e4));
        assert_eq!(g.edges.len(), 12);
        assert!((0..12).all(|q| g.neighbors(q).len() == 2));
    }

    #[test]
    fn isolated_nodes_and_floor() {
        let mut d = DeviceModel::new(5);
        d.add_coupling(0, 1, 0.0, CouplingKind::NearestNeighbor);
        d.add_coupling(1, 2, 3.0, CouplingKind::NearestNeighbor);
        let g = build_interaction_graph(&d);
        assert_eq!(g.num_nodes, 5);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(build_interaction_graph_with_floor(&d, 5.0).edges.len(), 0);
    }

    #[test]
    fn validation_findings() {
        assert!(validate(&DeviceModel::ring(12, 5e4)).is_empty());
        let mut d = DeviceModel::line(2, 5e4);
        d.add_coupling(1, 0, 5e4, CouplingKind::NearestNeighbor);
        assert_eq!(validate(&d).len(), 1);
        let mut d = DeviceModel::ring(12, 5e4);
        d.add_coupling(3, 99, 5e4, CouplingKind::NearestNeighbor);
        assert_eq!(validate(&d).len(), 1);
        let mut d = DeviceModel::line(2, 5e4);
        d.durations.measure_ns = None;
        assert_eq!(validate(&d).len(), 1);
    }

    #[test]
    fn json_round_trip() {
        let mut d = DeviceModel::line(3, 5e4);
        d.stark_terms.push(StarkTerm { driven_pair: (0, 1), spectator: 2, shift_hz: 2e4 });
        d.charge_parity.push(ChargeParity { qubit: 1, delta_hz: 1e3 });
        let back = DeviceModel::from_json(&d.to_json().unwrap()).unwrap();
        assert_eq!(back, d);
        let raw = r#"{"num_qubits":2,"couplings":[{"q0":0,"q1":1,"zz_hz":50000.0,"kind":"next-nearest-neighbor"}],
            "durations":{"ecr_ns":500,"x_ns":35,"sx_ns":35,"measure_ns":4000,"feedforward_ns":1150}}"#;
        let d = DeviceModel::from_json(raw).unwrap();
        assert_eq!(d.couplings[0].kind, CouplingKind::NextNearestNeighbor);
        assert!(validate(&d).is_empty());
        assert_eq!(d.duration(&Gate::UCan { alpha: 0.0, beta: 0.0, gamma: 0.0 }).unwrap(), 1500.0);
    }

    #[test]
    fn heavy_hex_is_connected() {
        let d = DeviceModel::heavy_hex_patch(5e4);
        assert!(validate(&d).is_empty());
        let g = build_interaction_graph(&d);
        let mut seen = vec![false; 20];
        let mut stack = vec![0];
        while let Some(q) = stack.pop() {
            if !std::mem::replace(&mut seen[q], true) {
                stack.extend(g.neighbors(q));
            }
        }
        assert!(seen.iter().all(|&s| s));
        assert!((0..20).all(|q| g.neighbors(q).len() <= 3));
    }
}

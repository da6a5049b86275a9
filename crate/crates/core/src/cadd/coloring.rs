use super::delays::DelayInterval;
use crate::circuit::ScheduledCircuit;
use crate::device::CrosstalkGraph;
use serde::Serialize;
use std::collections::BTreeMap;

/// Color 1 marks gate controls, color 2 gate targets.
pub const CONTROL_COLOR: usize = 1;
pub const TARGET_COLOR: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coloring {
    pub interval: usize,
    /// Colors of the idle qubits that receive sequences.
    pub colors: BTreeMap<usize, usize>,
    /// Gate qubits active during the interval (control 1, target 2).
    pub precolored: BTreeMap<usize, usize>,
}

/// Two-qubit gates overlapping `[t0, t1)`, as (control, target).
fn active_gates(circuit: &ScheduledCircuit, t0: f64, t1: f64) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for l in &circuit.layers {
        if l.end() <= t0 || l.t_start >= t1 {
            continue;
        }
        for g in l.two_qubit_gates() {
            if g.start() < t1 && t0 < g.end() {
                v.push((g.qubits[0], g.qubits[1]));
            }
        }
    }
    v
}

/// Greedy coloring per interval. Idle qubits are visited most-constrained
/// first (ties by ascending index) and get the smallest color unused by any
/// neighbour, including gate qubits and overlapping earlier intervals.
pub fn color_graph(intervals: &[DelayInterval], graph: &CrosstalkGraph, circuit: &ScheduledCircuit) -> Vec<Coloring> {
    let mut out: Vec<Coloring> = Vec::with_capacity(intervals.len());
    for (ii, iv) in intervals.iter().enumerate() {
        let mut fixed: BTreeMap<usize, usize> = BTreeMap::new();
        let mut precolored = BTreeMap::new();
        for (c, t) in active_gates(circuit, iv.t_start, iv.t_end) {
            precolored.insert(c, CONTROL_COLOR);
            precolored.insert(t, TARGET_COLOR);
        }
        fixed.extend(precolored.iter().map(|(k, v)| (*k, *v)));
        for (prev, col) in intervals[..ii].iter().zip(&out) {
            if prev.overlaps(iv.t_start, iv.t_end) {
                for (&q, &c) in &col.colors {
                    fixed.entry(q).or_insert(c);
                }
            }
        }
        let mut colors: BTreeMap<usize, usize> = BTreeMap::new();
        let mut pending: Vec<usize> = iv.qubits.clone();
        while !pending.is_empty() {
            let used = |q: usize, colors: &BTreeMap<usize, usize>| -> Vec<usize> {
                let mut u: Vec<usize> = graph
                    .neighbors(q)
                    .iter()
                    .filter_map(|n| colors.get(n).or_else(|| fixed.get(n)).copied())
                    .collect();
                u.sort_unstable();
                u.dedup();
                u
            };
            let (pos, _) = pending
                .iter()
                .enumerate()
                .map(|(i, &q)| (i, used(q, &colors).len()))
                .fold((0, usize::MAX), |best, (i, k)| {
                    // strictly more constrained wins; pending is ascending so ties keep the lower index
                    if best.1 == usize::MAX || k > best.1 {
                        (i, k)
                    } else {
                        best
                    }
                });
            let q = pending.remove(pos);
            let u = used(q, &colors);
            let c = (1..).find(|c| !u.contains(c)).unwrap();
            colors.insert(q, c);
        }
        out.push(Coloring { interval: ii, colors, precolored });
    }
    out
}

/// Every idle qubit gets the same color (aligned decoupling).
pub fn uniform_coloring(intervals: &[DelayInterval], color: usize) -> Vec<Coloring> {
    intervals
        .iter()
        .enumerate()
        .map(|(i, iv)| Coloring {
            interval: i,
            colors: iv.qubits.iter().map(|&q| (q, color)).collect(),
            precolored: BTreeMap::new(),
        })
        .collect()
}

/// Constraint violations of one coloring, as readable messages.
pub fn coloring_violations(col: &Coloring, graph: &CrosstalkGraph) -> Vec<String> {
    let mut v = Vec::new();
    let color_of = |q: usize| col.colors.get(&q).or_else(|| col.precolored.get(&q)).copied();
    for e in &graph.edges {
        let idle_a = col.colors.contains_key(&e.a);
        let idle_b = col.colors.contains_key(&e.b);
        if !(idle_a || idle_b) {
            continue;
        }
        if let (Some(x), Some(y)) = (color_of(e.a), color_of(e.b)) {
            if x == y {
                v.push(format!("edge ({}, {}) monochromatic with color {x}", e.a, e.b));
            }
        }
        for (idle, other) in [(e.a, e.b), (e.b, e.a)] {
            if let (Some(&c), Some(&p)) = (col.colors.get(&idle), col.precolored.get(&other)) {
                if p == CONTROL_COLOR && c == CONTROL_COLOR {
                    v.push(format!("control spectator {idle} uses color 1"));
                }
                if p == TARGET_COLOR && c == TARGET_COLOR {
                    v.push(format!("target spectator {idle} uses color 2"));
                }
            }
        }
    }
    for (&q, &c) in &col.colors {
        if c == 0 {
            v.push(format!("qubit {q} has the constant color"));
        }
    }
    v
}

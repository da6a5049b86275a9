use crate::circuit::{LayerKind, LayerRole, ScheduledCircuit};
use crate::device::CrosstalkGraph;
use serde::Serialize;

/// A set of qubits that idle together over `[t_start, t_end)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DelayInterval {
    pub qubits: Vec<usize>,
    pub t_start: f64,
    pub t_end: f64,
    pub layers: Vec<usize>,
}

impl DelayInterval {
    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn overlaps(&self, t0: f64, t1: f64) -> bool {
        self.t_start < t1 && t0 < self.t_end
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Idle {
    q: usize,
    t0: f64,
    t1: f64,
    layer: usize,
}

const EPS: f64 = 1e-9;

/// Default minimum delay for a given pulse width.
pub fn default_d_min(pulse_ns: f64) -> f64 {
    4.0 * pulse_ns + 2.0
}

/// Groups idle windows of timed layers that are adjacent on the crosstalk
/// graph and overlap in time, then splits each group at its widest jointly
/// idle stretch.
pub fn collect_joint_delays(circuit: &ScheduledCircuit, graph: &CrosstalkGraph, d_min: f64) -> Vec<DelayInterval> {
    let mut items = Vec::new();
    for (li, l) in circuit.layers.iter().enumerate() {
        if l.kind != LayerKind::TwoQubit || l.role != LayerRole::Normal {
            continue;
        }
        for inst in &l.instructions {
            if inst.gate.is_delay() && inst.duration >= d_min - EPS && inst.duration > 0.0 {
                items.push(Idle { q: inst.qubits[0], t0: inst.start(), t1: inst.end(), layer: li });
            }
        }
    }
    let mut out = Vec::new();
    let mut work = groups(items, graph);
    while let Some(g) = work.pop() {
        let (iv, rest) = split(&g, d_min);
        if let Some(iv) = iv {
            out.push(iv);
        }
        work.extend(groups(rest, graph));
    }
    out.sort_by(|a, b| {
        a.t_start
            .partial_cmp(&b.t_start)
            .unwrap()
            .then(a.qubits.cmp(&b.qubits))
    });
    out
}

fn linked(a: &Idle, b: &Idle, graph: &CrosstalkGraph) -> bool {
    a.t0 < b.t1 - EPS && b.t0 < a.t1 - EPS && graph.has_edge(a.q, b.q)
}

/// Connected components under adjacency + time overlap; isolated idles form singleton groups.
fn groups(items: Vec<Idle>, graph: &CrosstalkGraph) -> Vec<Vec<Idle>> {
    let n = items.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let nx = p[c];
            p[c] = r;
            c = nx;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if linked(&items[i], &items[j], graph) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut buckets: std::collections::BTreeMap<usize, Vec<Idle>> = Default::default();
    for (i, it) in items.into_iter().enumerate() {
        let r = find(&mut parent, i);
        buckets.entry(r).or_default().push(it);
    }
    // reversed so the earliest group is processed first by the pop loop
    let mut v: Vec<Vec<Idle>> = buckets.into_values().collect();
    v.reverse();
    v
}

/// Emits the widest jointly idle stretch of a group and returns the residues.
fn split(group: &[Idle], d_min: f64) -> (Option<DelayInterval>, Vec<Idle>) {
    let mut pts: Vec<f64> = group.iter().flat_map(|i| [i.t0, i.t1]).collect();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (*a - *b).abs() < EPS);
    let mut best: Option<(usize, f64, f64)> = None;
    for w in pts.windows(2) {
        let m = 0.5 * (w[0] + w[1]);
        let count = group.iter().filter(|i| i.t0 <= m && m < i.t1).count();
        if best.is_none_or(|b| count > b.0) {
            best = Some((count, w[0], w[1]));
        }
    }
    let Some((_, s0, s1)) = best else { return (None, Vec::new()) };
    let m = 0.5 * (s0 + s1);
    let members: Vec<&Idle> = group.iter().filter(|i| i.t0 <= m && m < i.t1).collect();
    let a = members.iter().map(|i| i.t0).fold(f64::NEG_INFINITY, f64::max);
    let b = members.iter().map(|i| i.t1).fold(f64::INFINITY, f64::min);
    let mut qubits: Vec<usize> = members.iter().map(|i| i.q).collect();
    qubits.sort_unstable();
    qubits.dedup();
    let mut layers: Vec<usize> = members.iter().map(|i| i.layer).collect();
    layers.sort_unstable();
    layers.dedup();
    let mut rest = Vec::new();
    for it in group {
        if it.t0 <= m && m < it.t1 {
            for (t0, t1) in [(it.t0, a), (b, it.t1)] {
                if t1 - t0 >= d_min - EPS && t1 - t0 > EPS {
                    rest.push(Idle { t0, t1, ..*it });
                }
            }
        } else {
            rest.push(*it);
        }
    }
    let iv = (b - a >= d_min - EPS).then(|| DelayInterval { qubits, t_start: a, t_end: b, layers });
    (iv, rest)
}

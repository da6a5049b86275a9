use super::NoiseModel;
use crate::circuit::{Gate, Layer, LayerKind, LayerRole, ScheduledCircuit};
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Constant-sign stretch of a timed layer. `signs[q]` is the toggling-frame
/// sign of `Z_q`: +1, -1, or 0 while a target's coupling is suppressed.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub t0: f64,
    pub t1: f64,
    pub signs: Vec<i8>,
}

/// Integrated error of one timed layer: `RZZ(zz angle)` per edge and `RZ(z[q])`
/// per qubit, plus a parity angle `s * parity[q]` with a per-shot sign `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerNoise {
    pub layer: usize,
    pub segments: Vec<Segment>,
    pub zz: Vec<(usize, usize, f64)>,
    pub z: Vec<f64>,
    pub parity: Vec<f64>,
}

impl LayerNoise {
    pub fn is_zero(&self) -> bool {
        self.zz.iter().all(|e| e.2 == 0.0) && self.z.iter().all(|&a| a == 0.0) && self.parity.iter().all(|&a| a == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseTimeline {
    pub layers: Vec<LayerNoise>,
}

#[derive(Clone, Copy, Debug)]
enum Role {
    Control { start: f64, mid: f64, end: f64 },
    Target { start: f64, end: f64 },
    Measured,
    Idle,
}

struct QubitFrame {
    role: Role,
    /// (start, end) of each X/Y pulse; the qubit's noise is suspended while it is driven.
    pulses: Vec<(f64, f64)>,
    final_sign: i8,
}

impl QubitFrame {
    fn sign(&self, t: f64) -> i8 {
        match self.role {
            Role::Control { start, mid, end } if t >= start && t < end => {
                if t < mid {
                    1
                } else {
                    -1
                }
            }
            Role::Target { start, end } if t >= start && t < end => 0,
            Role::Measured => 1,
            _ => {
                if self.pulses.iter().any(|&(a, b)| t >= a && t < b) {
                    return 0;
                }
                let flips = self.pulses.iter().filter(|&&(_, b)| b <= t).count();
                let s = if flips % 2 == 0 { 1 } else { -1 };
                s * self.final_sign
            }
        }
    }
}

fn frames(layer: &Layer, n: usize) -> Result<(Vec<QubitFrame>, Vec<f64>)> {
    let mut f: Vec<QubitFrame> = (0..n).map(|_| QubitFrame { role: Role::Idle, pulses: Vec::new(), final_sign: 1 }).collect();
    let mut events = vec![layer.t_start, layer.end()];
    for inst in &layer.instructions {
        let (a, b) = (inst.start(), inst.end());
        match &inst.gate {
            Gate::Delay(_) | Gate::Barrier | Gate::I => {}
            g if g.is_two_qubit() => {
                let mid = (a + b) / 2.0;
                f[inst.qubits[0]].role = Role::Control { start: a, mid, end: b };
                f[inst.qubits[1]].role = Role::Target { start: a, end: b };
                events.extend([a, mid, b]);
            }
            Gate::Measure { .. } => f[inst.qubits[0]].role = Role::Measured,
            Gate::X | Gate::Y => {
                f[inst.qubits[0]].pulses.push((a, b));
                events.extend([a, b]);
            }
            Gate::RZ(_) | Gate::Z => {}
            other => {
                return Err(Error::InvalidCircuit(format!(
                    "`{}` is not allowed inside a timed layer",
                    other.name()
                )))
            }
        }
    }
    for q in f.iter_mut() {
        // express the error in the frame after the layer
        if q.pulses.len() % 2 == 1 && matches!(q.role, Role::Idle) {
            q.final_sign = -1;
        }
    }
    events.retain(|&t| t >= layer.t_start && t <= layer.end());
    events.sort_by(|a, b| a.partial_cmp(b).unwrap());
    events.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    Ok((f, events))
}

/// Integrated noise of a single timed layer.
pub fn layer_noise(layer: &Layer, layer_index: usize, noise: &NoiseModel) -> Result<LayerNoise> {
    let n = noise.num_qubits;
    let (fr, events) = frames(layer, n)?;
    let segments: Vec<Segment> = events
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let tm = 0.5 * (w[0] + w[1]);
            Segment { t0: w[0], t1: w[1], signs: fr.iter().map(|q| q.sign(tm)).collect() }
        })
        .collect();
    let ns = 1e-9;
    let int1 = |q: usize| -> f64 { segments.iter().map(|s| s.signs[q] as f64 * (s.t1 - s.t0)).sum::<f64>() * ns };
    let mut z = vec![0.0; n];
    let mut zz = Vec::with_capacity(noise.edges.len());
    for &(a, b, nu) in &noise.edges {
        let ab: f64 = segments
            .iter()
            .map(|s| (s.signs[a] * s.signs[b]) as f64 * (s.t1 - s.t0))
            .sum::<f64>()
            * ns;
        // H = (π ν / 2)(s_a s_b ZZ - s_a Z_a - s_b Z_b)
        zz.push((a, b, PI * nu * ab));
        z[a] -= PI * nu * int1(a);
        z[b] -= PI * nu * int1(b);
    }
    for st in &noise.stark {
        let (c, t) = st.driven_pair;
        let driven = layer
            .two_qubit_gates()
            .find(|g| g.qubits[0] == c && g.qubits[1] == t);
        if let Some(g) = driven {
            let q = st.spectator;
            let w: f64 = segments
                .iter()
                .map(|s| {
                    let lo = s.t0.max(g.start());
                    let hi = s.t1.min(g.end());
                    if hi > lo {
                        s.signs[q] as f64 * (hi - lo)
                    } else {
                        0.0
                    }
                })
                .sum::<f64>()
                * ns;
            z[q] += 2.0 * PI * st.shift_hz * w;
        }
    }
    let mut parity = vec![0.0; n];
    for &(q, delta) in &noise.parity {
        parity[q] += PI * delta * int1(q);
    }
    Ok(LayerNoise { layer: layer_index, segments, zz, z, parity })
}

/// Noise of every timed, non-correction layer of a scheduled circuit.
pub fn build_timeline(circuit: &ScheduledCircuit, noise: &NoiseModel) -> Result<NoiseTimeline> {
    let mut layers = Vec::new();
    for (i, l) in circuit.layers.iter().enumerate() {
        if l.kind == LayerKind::TwoQubit && l.role == LayerRole::Normal {
            layers.push(layer_noise(l, i, noise)?);
        }
    }
    Ok(NoiseTimeline { layers })
}

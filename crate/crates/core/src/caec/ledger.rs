use crate::circuit::{Gate, Layer, LayerKind};
use crate::device::DeviceModel;
use crate::error::Result;
use crate::euler::z_action;
use crate::sim::{layer_noise, NoiseModel};
use serde::Serialize;
use std::collections::BTreeMap;

/// Pending correction angles: `RZ(one_q[q])` and `RZZ(two_q[(a, b)])`, `a < b`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CompensationLedger {
    pub one_q: BTreeMap<usize, f64>,
    pub two_q: BTreeMap<(usize, usize), f64>,
}

const ZERO_TOL: f64 = 1e-15;

impl CompensationLedger {
    pub fn is_empty(&self) -> bool {
        self.one_q.values().all(|a| a.abs() < ZERO_TOL) && self.two_q.values().all(|a| a.abs() < ZERO_TOL)
    }

    pub fn add_one(&mut self, q: usize, angle: f64) {
        *self.one_q.entry(q).or_insert(0.0) += angle;
    }

    pub fn add_two(&mut self, a: usize, b: usize, angle: f64) {
        *self.two_q.entry((a.min(b), a.max(b))).or_insert(0.0) += angle;
    }

    pub fn take_one(&mut self, q: usize) -> f64 {
        self.one_q.remove(&q).unwrap_or(0.0)
    }

    pub fn take_two(&mut self, e: (usize, usize)) -> f64 {
        self.two_q.remove(&e).unwrap_or(0.0)
    }

    pub(crate) fn prune(&mut self) {
        self.one_q.retain(|_, a| a.abs() >= ZERO_TOL);
        self.two_q.retain(|_, a| a.abs() >= ZERO_TOL);
    }
}

/// Context of a crosstalk edge during one timed layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ContextCase {
    JointIdle,
    ControlSpectator,
    TargetSpectator,
    ControlControl,
    GateEdge,
    RefocusedOther,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Role {
    Idle,
    Measured,
    Control(usize),
    Target(usize),
}

pub(crate) fn role_of(layer: &Layer, q: usize) -> Role {
    for (i, inst) in layer.instructions.iter().enumerate() {
        if !inst.qubits.contains(&q) {
            continue;
        }
        if inst.gate.is_two_qubit() {
            return if inst.qubits[0] == q { Role::Control(i) } else { Role::Target(i) };
        }
        if matches!(inst.gate, Gate::Measure { .. }) {
            return Role::Measured;
        }
    }
    Role::Idle
}

pub fn classify_edge(layer: &Layer, edge: (usize, usize)) -> ContextCase {
    use Role::*;
    let (a, b) = (role_of(layer, edge.0), role_of(layer, edge.1));
    let idle = |r: Role| matches!(r, Idle | Measured);
    match (a, b) {
        (Control(i), Target(j)) | (Target(j), Control(i)) if i == j => ContextCase::GateEdge,
        (x, y) if idle(x) && idle(y) => ContextCase::JointIdle,
        (Control(_), y) | (y, Control(_)) if idle(y) => ContextCase::ControlSpectator,
        (Target(_), y) | (y, Target(_)) if idle(y) => ContextCase::TargetSpectator,
        (Control(_), Control(_)) => ContextCase::ControlControl,
        _ => ContextCase::RefocusedOther,
    }
}

/// Adds the inverse of the layer's coherent error (ZZ and Stark terms) to the ledger.
pub fn accumulate(ledger: &mut CompensationLedger, layer: &Layer, device: &DeviceModel) -> Result<()> {
    accumulate_with(ledger, layer, &NoiseModel::coherent(device), 1.0)
}

/// Same as [`accumulate`] with a prebuilt model; `scale` stretches the layer's
/// angles (used when the true layer duration is only estimated).
pub fn accumulate_with(ledger: &mut CompensationLedger, layer: &Layer, noise: &NoiseModel, scale: f64) -> Result<()> {
    if layer.kind != LayerKind::TwoQubit {
        return Ok(());
    }
    let ln = layer_noise(layer, 0, noise)?;
    for &(a, b, ang) in &ln.zz {
        if ang != 0.0 {
            ledger.add_two(a, b, -ang * scale);
        }
    }
    for (q, &ang) in ln.z.iter().enumerate() {
        if ang != 0.0 {
            ledger.add_one(q, -ang * scale);
        }
    }
    Ok(())
}

/// How conjugation by the layer's operation on `q` acts on `Z_q`:
/// `Some(±1)` for `Z -> ±Z`, `None` if `Z` is not preserved.
pub(crate) fn z_sign_1q(layer: &Layer, q: usize) -> Option<i8> {
    match layer.op_on(q) {
        None => Some(1),
        Some(inst) => match &inst.gate {
            Gate::Conditional { gate, .. } => gate.matrix1().and_then(|m| z_action(&m)).filter(|&s| s == 1),
            g => g.matrix1().and_then(|m| z_action(&m)),
        },
    }
}

/// Whether `Z_q` commutes with everything the timed layer does to `q`.
pub(crate) fn z_transparent_2q(layer: &Layer, q: usize) -> bool {
    let mut pulses = 0;
    for inst in layer.instructions.iter().filter(|i| i.qubits.contains(&q)) {
        match &inst.gate {
            Gate::Delay(_) | Gate::Measure { .. } | Gate::RZZ(_) | Gate::RZ(_) | Gate::Z | Gate::I | Gate::Barrier => {}
            Gate::X | Gate::Y => pulses += 1,
            Gate::Ecr | Gate::Cnot => {
                if inst.qubits[0] != q {
                    return false;
                }
            }
            _ => return false,
        }
    }
    pulses % 2 == 0
}

/// Outcome of pushing the ledger through a one-qubit layer.
#[derive(Clone, Debug, PartialEq)]
pub struct CommuteOutcome {
    pub ledger: CompensationLedger,
    pub flush_one: Vec<(usize, f64)>,
    pub flush_two: Vec<((usize, usize), f64)>,
}

/// Entries whose error operator commutes (anticommutes) with the layer keep
/// (flip) their sign; entries meeting a gate that does not preserve `Z` are
/// returned for flushing.
pub fn commute_through(ledger: &CompensationLedger, layer: &Layer) -> CommuteOutcome {
    let mut out = CompensationLedger::default();
    let mut flush_one = Vec::new();
    let mut flush_two = Vec::new();
    for (&q, &a) in &ledger.one_q {
        match z_sign_1q(layer, q) {
            Some(s) => out.add_one(q, s as f64 * a),
            None => flush_one.push((q, a)),
        }
    }
    for (&(p, q), &a) in &ledger.two_q {
        match (z_sign_1q(layer, p), z_sign_1q(layer, q)) {
            (Some(s), Some(t)) => out.add_two(p, q, (s * t) as f64 * a),
            _ => flush_two.push(((p, q), a)),
        }
    }
    CommuteOutcome { ledger: out, flush_one, flush_two }
}

/// `RZ(angle)` applied just before `gate`, fused into one native gate.
pub fn absorb_rz(gate: &Gate, angle: f64) -> Result<Gate> {
    let m = gate.matrix1().ok_or_else(|| crate::Error::UnknownGate(gate.name().to_string()))?;
    let u = crate::euler::compose_time_order([&crate::math::gates::rz(angle), &m]);
    crate::stratify::fuse_matrix(&u)
}

/// Host update for an `RZZ(angle)` correction on the gate's own pair.
pub fn absorb_rzz(gate: &Gate, angle: f64) -> Option<Gate> {
    match *gate {
        Gate::RZZ(a) => Some(Gate::RZZ(a + angle)),
        Gate::UCan { alpha, beta, gamma } => Some(Gate::UCan { alpha, beta, gamma: gamma - angle / 2.0 }),
        _ => None,
    }
}

//! Pauli twirling of two-qubit gates with recombination into neighbouring
//! one-qubit layers. CNOT/ECR draw from all 16 Paulis; `UCan` draws from its
//! commutant {II, XX, YY, ZZ}.

use crate::circuit::{Gate, Layer, LayerKind, LayerRole, ScheduledCircuit};
use crate::error::{Error, Result};
use crate::euler::compose_time_order;
use crate::math::{mat4_adjoint, mat4_mul, Mat2, Mat4, C64};
use crate::pauli::{Pauli, PauliString};
use crate::stratify::fuse_matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwirlGate {
    pub qubits: [usize; 2],
    #[serde(serialize_with = "ser_pauli")]
    pub before: PauliString,
    #[serde(serialize_with = "ser_pauli")]
    pub after: PauliString,
}

fn ser_pauli<S: serde::Serializer>(p: &PauliString, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwirlRecord {
    pub layer_index: usize,
    pub gates: Vec<TwirlGate>,
    pub seed: u64,
}

fn pauli4(p: &PauliString) -> Mat4 {
    let m = p.matrix();
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = m[i][j];
        }
    }
    out
}

/// Returns `G P G†` as a phased Pauli string; then `after · G · before = G`.
/// Fails with `NotClifford` when the image is not a Pauli.
pub fn twirl_sandwich(gate: &Gate, p_before: &PauliString) -> Result<PauliString> {
    if p_before.len() != 2 {
        return Err(Error::LengthMismatch(p_before.len(), 2));
    }
    let g = gate.matrix2().ok_or_else(|| Error::NotClifford(gate.name().to_string()))?;
    let m = mat4_mul(&g, &mat4_mul(&pauli4(p_before), &mat4_adjoint(&g)));
    for idx in 0..16 {
        let q = PauliString::from_index(2, idx);
        let qm = pauli4(&q);
        let mut tr = C64::new(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                tr += qm[i][j].conj() * m[i][j];
            }
        }
        let c = tr / 4.0;
        if (c.norm() - 1.0).abs() < 1e-9 {
            let phase = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)]
                .iter()
                .position(|ph| (ph - c).norm() < 1e-9)
                .expect("pauli phase") as u8;
            return Ok(PauliString { symbols: q.symbols, phase });
        }
    }
    Err(Error::NotClifford(gate.name().to_string()))
}

/// Adds empty one-qubit layers at either end when a twirlable two-qubit layer
/// sits on the boundary.
pub fn ensure_boundary_layers(circuit: &ScheduledCircuit) -> ScheduledCircuit {
    let mut out = circuit.clone();
    if out.layers.first().is_some_and(|l| l.kind == LayerKind::TwoQubit) {
        out.layers.insert(0, Layer::new(LayerKind::OneQubit));
    }
    if out.layers.last().is_some_and(|l| l.kind == LayerKind::TwoQubit) {
        out.layers.push(Layer::new(LayerKind::OneQubit));
    }
    out
}

const ALL_PAULIS: [usize; 16] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15];
const CANONICAL_COMMUTANT: [usize; 4] = [0, 5, 10, 15];

/// Pauli indices a gate may be twirled with.
fn twirl_set(gate: &Gate) -> Option<&'static [usize]> {
    match gate {
        g if g.is_clifford_2q() => Some(&ALL_PAULIS),
        Gate::UCan { .. } => Some(&CANONICAL_COMMUTANT),
        _ => None,
    }
}

fn twirlable(l: &Layer) -> bool {
    l.kind == LayerKind::TwoQubit && l.role == LayerRole::Normal && l.instructions.iter().any(|i| twirl_set(&i.gate).is_some())
}

/// Twirls every CNOT/ECR with a uniformly random two-qubit Pauli and every
/// `UCan` with a random element of its commutant. Idle qubits and `RZZ` are
/// left alone.
pub fn pauli_twirl(circuit: &ScheduledCircuit, seed: u64) -> Result<(ScheduledCircuit, Vec<TwirlRecord>)> {
    for w in circuit.layers.windows(2) {
        if w[0].kind == w[1].kind {
            return Err(Error::NotStratified("adjacent layers share a kind".into()));
        }
    }
    let mut out = if circuit.scheduled { circuit.clone() } else { ensure_boundary_layers(circuit) };
    let n = out.num_qubits;
    let last = out.layers.len().saturating_sub(1);
    for (i, l) in out.layers.iter().enumerate() {
        if twirlable(l) && (i == 0 || i == last) {
            return Err(Error::NotStratified(format!(
                "two-qubit layer {i} has no neighbouring one-qubit layer to absorb twirls"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // per one-qubit layer: qubit -> (paulis applied before the gate, after the gate)
    let mut extra: BTreeMap<usize, BTreeMap<usize, (Vec<Pauli>, Vec<Pauli>)>> = BTreeMap::new();
    let mut records = Vec::new();
    for (i, l) in out.layers.iter().enumerate() {
        if !twirlable(l) {
            continue;
        }
        let mut gates = Vec::new();
        for inst in &l.instructions {
            let Some(set) = twirl_set(&inst.gate) else { continue };
            let before = PauliString::from_index(2, set[rng.gen_range(0..set.len())]);
            let after = twirl_sandwich(&inst.gate, &before)?;
            for k in 0..2 {
                let q = inst.qubits[k];
                extra.entry(i - 1).or_default().entry(q).or_default().1.push(before.symbols[k]);
                extra.entry(i + 1).or_default().entry(q).or_default().0.push(after.symbols[k]);
            }
            gates.push(TwirlGate { qubits: [inst.qubits[0], inst.qubits[1]], before, after });
        }
        records.push(TwirlRecord { layer_index: i, gates, seed });
    }
    let timed = out.scheduled;
    for (li, per_q) in extra {
        let layer = &mut out.layers[li];
        for (q, (pre, post)) in per_q {
            if q >= n {
                continue;
            }
            let existing = layer.op_on(q).cloned();
            if existing.as_ref().is_some_and(|e| matches!(e.gate, Gate::Conditional { .. })) {
                return Err(Error::InvalidCircuit("cannot merge a twirl into a conditional gate".into()));
            }
            let mut ms: Vec<Mat2> = pre.iter().map(|p| p.matrix()).collect();
            if let Some(e) = &existing {
                ms.push(e.gate.matrix1().ok_or_else(|| Error::UnknownGate(e.gate.name().to_string()))?);
            }
            ms.extend(post.iter().map(|p| p.matrix()));
            let u = compose_time_order(ms.iter());
            let g = fuse_matrix(&u)?;
            let keep = match g {
                Gate::RZ(a) if a.abs() < 1e-14 && existing.is_none() => None,
                g => Some(g),
            };
            let dur = existing.as_ref().filter(|e| !e.gate.is_virtual()).map(|e| e.duration);
            layer.set_one_qubit_op(q, keep, timed, dur);
        }
    }
    Ok((out, records))
}

//! Layer stratification: alternating one-qubit and two-qubit (timed) layers.

use crate::circuit::{validate_instruction, Circuit, Gate, Instruction, Layer, LayerKind, ScheduledCircuit};
use crate::error::{Error, Result};
use crate::euler::{compose_time_order, euler_decompose, z_action};
use crate::math::Mat2;

/// Layer kind an instruction must live in.
fn home_kind(g: &Gate) -> LayerKind {
    match g {
        Gate::Measure { .. } | Gate::Delay(_) => LayerKind::TwoQubit,
        g if g.is_two_qubit() => LayerKind::TwoQubit,
        _ => LayerKind::OneQubit,
    }
}

struct Builder {
    kinds: Vec<LayerKind>,
    /// Per layer, per qubit, the gates placed there in time order.
    slots: Vec<Vec<Vec<Instruction>>>,
    n: usize,
}

impl Builder {
    fn ensure(&mut self, idx: usize, kind: LayerKind) {
        while self.kinds.len() <= idx {
            let next = match self.kinds.last() {
                None => kind,
                Some(LayerKind::OneQubit) => LayerKind::TwoQubit,
                Some(LayerKind::TwoQubit) => LayerKind::OneQubit,
            };
            self.kinds.push(next);
            self.slots.push(vec![Vec::new(); self.n]);
        }
    }

    /// Smallest layer index of `kind` strictly after `after`.
    fn next_of(&mut self, kind: LayerKind, after: Option<usize>) -> usize {
        let mut idx = after.map_or(0, |a| a + 1);
        if self.kinds.is_empty() {
            self.ensure(0, kind);
        }
        self.ensure(idx, kind);
        if self.kinds[idx] != kind {
            idx += 1;
            self.ensure(idx, kind);
        }
        idx
    }
}

/// Stratifies an untimed instruction list. Runs of unconditioned one-qubit
/// gates on a qubit are fused into one `U1q` (or a virtual `RZ` when the
/// product is diagonal).
pub fn stratify(circuit: &Circuit) -> Result<ScheduledCircuit> {
    let n = circuit.num_qubits;
    check_timed_overlap(circuit)?;
    let mut b = Builder { kinds: Vec::new(), slots: Vec::new(), n };
    let mut last: Vec<Option<usize>> = vec![None; n];
    let mut clbit_layer: Vec<Option<usize>> = Vec::new();
    for inst in &circuit.instructions {
        validate_instruction(inst, n)?;
        let g = &inst.gate;
        if matches!(g, Gate::Barrier) {
            let qs: Vec<usize> = if inst.qubits.is_empty() { (0..n).collect() } else { inst.qubits.clone() };
            let m = qs.iter().filter_map(|&q| last[q]).max();
            for q in qs {
                last[q] = m;
            }
            continue;
        }
        let kind = home_kind(g);
        let mut after = inst.qubits.iter().filter_map(|&q| last[q]).max();
        if let Gate::Conditional { clbit, .. } = g {
            let ml = clbit_layer.get(*clbit).copied().flatten().ok_or(Error::MissingCondition)?;
            after = after.max(Some(ml));
        }
        // fuse into the previous one-qubit slot when possible
        if kind == LayerKind::OneQubit && !matches!(g, Gate::Conditional { .. }) {
            let q = inst.qubits[0];
            if let Some(l) = last[q] {
                if b.kinds[l] == LayerKind::OneQubit
                    && b.slots[l][q].iter().all(|i| !matches!(i.gate, Gate::Conditional { .. }))
                {
                    b.slots[l][q].push(strip(inst));
                    continue;
                }
            }
        }
        let idx = b.next_of(kind, after);
        b.slots[idx][inst.qubits[0]].push(strip(inst));
        for &q in &inst.qubits {
            last[q] = Some(idx);
        }
        if let Gate::Measure { clbit } = g {
            if clbit_layer.len() <= *clbit {
                clbit_layer.resize(clbit + 1, None);
            }
            clbit_layer[*clbit] = Some(idx);
        }
    }
    let mut out = ScheduledCircuit::new(n);
    for (kind, slots) in b.kinds.into_iter().zip(b.slots) {
        let mut layer = Layer::new(kind);
        for (q, insts) in slots.into_iter().enumerate() {
            if kind == LayerKind::OneQubit && insts.len() > 1 {
                layer.instructions.push(Instruction::new(fuse(&insts)?, &[q]));
            } else if kind == LayerKind::TwoQubit {
                // several raw delays on one qubit in a single layer collapse to their sum
                let total: f64 = insts.iter().filter_map(|i| if let Gate::Delay(d) = i.gate { Some(d) } else { None }).sum();
                let (delays, rest): (Vec<_>, Vec<_>) = insts.into_iter().partition(|i| i.gate.is_delay());
                layer.instructions.extend(rest);
                if !delays.is_empty() {
                    layer.instructions.push(Instruction::new(Gate::Delay(total), &[q]));
                }
            } else {
                layer.instructions.extend(insts);
            }
        }
        out.layers.push(layer);
    }
    Ok(out)
}

fn strip(inst: &Instruction) -> Instruction {
    Instruction::new(inst.gate.clone(), &inst.qubits)
}

/// Fuses one-qubit gates given in time order.
pub fn fuse(insts: &[Instruction]) -> Result<Gate> {
    let ms: Vec<Mat2> = insts
        .iter()
        .map(|i| i.gate.matrix1().ok_or_else(|| Error::UnknownGate(i.gate.name().to_string())))
        .collect::<Result<_>>()?;
    fuse_matrix(&compose_time_order(ms.iter()))
}

/// Native gate for a one-qubit unitary: a virtual `RZ` if diagonal, otherwise `U1q`.
pub fn fuse_matrix(m: &Mat2) -> Result<Gate> {
    if z_action(m) == Some(1) {
        let angle = crate::math::canonical_angle((m[1][1] / m[0][0]).arg());
        return Ok(Gate::RZ(angle));
    }
    let (alpha, beta, gamma) = euler_decompose(m)?;
    Ok(Gate::U1q { alpha, beta, gamma })
}

fn check_timed_overlap(c: &Circuit) -> Result<()> {
    if c.instructions.is_empty() || c.instructions.iter().any(|i| i.t_start.is_none()) {
        return Ok(());
    }
    let mut spans: Vec<Vec<(f64, f64)>> = vec![Vec::new(); c.num_qubits];
    for i in &c.instructions {
        for &q in &i.qubits {
            if q < c.num_qubits {
                spans[q].push((i.start(), i.end()));
            }
        }
    }
    for (q, s) in spans.iter_mut().enumerate() {
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in s.windows(2) {
            if w[1].0 < w[0].1 - 1e-9 {
                return Err(Error::Overlap {
                    qubit: q,
                    detail: format!("[{}, {}) and [{}, {})", w[0].0, w[0].1, w[1].0, w[1].1),
                });
            }
        }
    }
    Ok(())
}

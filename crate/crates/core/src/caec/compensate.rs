use super::ledger::{absorb_rz, absorb_rzz, accumulate_with, z_sign_1q, z_transparent_2q, CompensationLedger};
use crate::circuit::{Gate, Instruction, Layer, LayerKind, LayerRole, ScheduledCircuit};
use crate::device::DeviceModel;
use crate::error::{Error, Result};
use crate::schedule::schedule;
use crate::sim::NoiseModel;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Disposition {
    /// Folded into an existing gate's parameters.
    Absorbed,
    /// Emitted as a new gate (a virtual RZ or an explicit RZZ).
    Inserted,
    /// Emitted as a classically conditioned RZ.
    Conditional,
    /// Left out because it only multiplies a final Z-basis measurement by a phase.
    Dropped,
}

/// One applied correction. `layer` indexes the output circuit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Compensation {
    pub qubits: Vec<usize>,
    pub angle: f64,
    pub disposition: Disposition,
    pub layer: usize,
    pub gate: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CompensationReport {
    pub compensations: Vec<Compensation>,
    /// Number of correction layers added (each costs makespan).
    pub inserted_layers: usize,
}

impl CompensationReport {
    pub fn count(&self, d: Disposition) -> usize {
        self.compensations.iter().filter(|c| c.disposition == d).count()
    }

    /// Explicit two-qubit corrections, the only ones that cost time.
    pub fn inserted_two_qubit(&self) -> usize {
        self.compensations
            .iter()
            .filter(|c| c.disposition == Disposition::Inserted && c.qubits.len() == 2)
            .count()
    }
}

/// Last host gate (UCan/RZZ on exactly the pair) reachable backwards with
/// only Z-preserving operations in between, and the accumulated sign.
type Host = Option<(usize, usize, i8)>;

/// Per-layer duration stretch used by the dynamic variant.
pub(crate) type Stretch = BTreeMap<usize, f64>;

/// Conditional corrections waiting for the next one-qubit layer: (qubit, clbit, value) -> angle.
pub(crate) type CondLedger = BTreeMap<(usize, usize, u8), f64>;

pub(crate) struct Pass<'a> {
    device: &'a DeviceModel,
    noise: NoiseModel,
    out: Vec<Layer>,
    ledger: CompensationLedger,
    pending_cond: CondLedger,
    hosts: BTreeMap<(usize, usize), Host>,
    report: CompensationReport,
}

const TOL: f64 = 1e-15;

fn correction_layer(kind: LayerKind) -> Layer {
    let mut l = Layer::new(kind);
    l.role = LayerRole::Correction;
    l
}

impl<'a> Pass<'a> {
    pub(crate) fn new(device: &'a DeviceModel) -> Self {
        let noise = NoiseModel::coherent(device);
        let hosts = noise.edges.iter().map(|&(a, b, _)| ((a.min(b), a.max(b)), None)).collect();
        Pass {
            device,
            noise,
            out: Vec::new(),
            ledger: CompensationLedger::default(),
            pending_cond: BTreeMap::new(),
            hosts,
            report: CompensationReport::default(),
        }
    }

    fn record(&mut self, qubits: Vec<usize>, angle: f64, disposition: Disposition, layer: usize, gate: &Gate) {
        self.report.compensations.push(Compensation { qubits, angle, disposition, layer, gate: gate.name().to_string() });
    }

    /// Appends an empty one-qubit layer and a correction layer holding `RZZ(angle)` on `e`
    /// (or an empty two-qubit layer and the correction, depending on what came last).
    fn insert_rzz(&mut self, e: (usize, usize), angle: f64) {
        let last_is_2q = self.out.last().map(|l| l.kind == LayerKind::TwoQubit).unwrap_or(false);
        if last_is_2q {
            // reuse a trailing correction layer when the pair is free there
            if let Some(l) = self.out.last_mut() {
                if l.role == LayerRole::Correction && l.gate_on(e.0).is_none() && l.gate_on(e.1).is_none() {
                    l.instructions.push(Instruction::new(Gate::RZZ(angle), &[e.0, e.1]));
                    let idx = self.out.len() - 1;
                    self.record(vec![e.0, e.1], angle, Disposition::Inserted, idx, &Gate::RZZ(angle));
                    return;
                }
            }
            self.out.push(correction_layer(LayerKind::OneQubit));
        } else if self.out.is_empty() {
            self.out.push(correction_layer(LayerKind::TwoQubit));
            self.out.push(correction_layer(LayerKind::OneQubit));
        }
        let mut l = correction_layer(LayerKind::TwoQubit);
        l.instructions.push(Instruction::new(Gate::RZZ(angle), &[e.0, e.1]));
        self.out.push(l);
        self.report.inserted_layers += 1;
        let idx = self.out.len() - 1;
        self.record(vec![e.0, e.1], angle, Disposition::Inserted, idx, &Gate::RZZ(angle));
    }

    /// Flushes a two-qubit entry at the current end of the output.
    fn flush_two(&mut self, e: (usize, usize), angle: f64) {
        if angle.abs() < TOL {
            return;
        }
        if let Some(Some((li, ii, sign))) = self.hosts.get(&e).copied() {
            let inst = &mut self.out[li].instructions[ii];
            if let Some(g) = absorb_rzz(&inst.gate, sign as f64 * angle) {
                inst.gate = g.clone();
                self.record(vec![e.0, e.1], angle, Disposition::Absorbed, li, &g);
                return;
            }
        }
        self.insert_rzz(e, angle);
        // the correction layer is a fresh host for later entries on this pair
        let li = self.out.len() - 1;
        if let Some(ii) = self.out[li].instructions.iter().position(|i| i.qubits == [e.0, e.1]) {
            self.hosts.insert(e, Some((li, ii, 1)));
        }
    }

    fn one_q_layer(&mut self, mut layer: Layer) -> Result<()> {
        let timed = layer.instructions.iter().any(|i| i.t_start.is_some());
        let idx = self.out.len();
        // two-qubit entries
        let entries: Vec<_> = self.ledger.two_q.iter().map(|(&e, &a)| (e, a)).collect();
        let mut blocked = Vec::new();
        for (e, a) in entries {
            match (z_sign_1q(&layer, e.0), z_sign_1q(&layer, e.1)) {
                (Some(s), Some(t)) => {
                    self.ledger.two_q.insert(e, (s * t) as f64 * a);
                }
                _ => blocked.push((e, a)),
            }
        }
        for (e, a) in blocked {
            self.ledger.two_q.remove(&e);
            self.flush_two(e, a);
        }
        // flushing may have appended layers
        let idx = if self.out.len() != idx { self.out.len() } else { idx };
        // one-qubit entries land here, unless the slot is a conditional
        let entries: Vec<_> = self.ledger.one_q.iter().map(|(&q, &a)| (q, a)).collect();
        self.ledger.one_q.clear();
        let mut deferred = Vec::new();
        for (q, a) in entries {
            if a.abs() < TOL {
                continue;
            }
            let existing = layer.op_on(q).map(|i| i.gate.clone());
            match existing {
                None => {
                    let g = Gate::RZ(a);
                    layer.set_one_qubit_op(q, Some(g.clone()), timed, None);
                    self.record(vec![q], a, Disposition::Inserted, idx, &g);
                }
                Some(Gate::Conditional { gate, .. }) => {
                    if gate.matrix1().and_then(|m| crate::euler::z_action(&m)) == Some(1) {
                        deferred.push((q, a));
                    } else {
                        return Err(Error::InvalidCircuit(format!(
                            "cannot place a Z correction on qubit {q} ahead of a conditional non-diagonal gate"
                        )));
                    }
                }
                Some(g) => {
                    let d = layer.op_on(q).map(|i| i.duration);
                    let ng = absorb_rz(&g, a)?;
                    let dur = if timed && !ng.is_virtual() { d.filter(|&d| d > 0.0) } else { None };
                    layer.set_one_qubit_op(q, Some(ng.clone()), timed, dur);
                    self.record(vec![q], a, Disposition::Absorbed, idx, &ng);
                }
            }
        }
        // pending conditional corrections (dynamic variant)
        let conds: Vec<_> = std::mem::take(&mut self.pending_cond).into_iter().collect();
        for ((q, clbit, value), a) in conds {
            let existing = layer.op_on(q).map(|i| i.gate.clone());
            let g = match existing {
                None => Gate::Conditional { gate: Box::new(Gate::RZ(a)), clbit, value },
                Some(Gate::Conditional { gate, clbit: c2, value: v2 }) if c2 == clbit && v2 == value => {
                    let inner = absorb_rz(&gate, a)?;
                    Gate::Conditional { gate: Box::new(inner), clbit, value }
                }
                Some(_) => {
                    return Err(Error::InvalidCircuit(format!(
                        "no free slot for a conditional correction on qubit {q}"
                    )))
                }
            };
            layer.set_one_qubit_op(q, Some(g.clone()), timed, None);
            self.record(vec![q], a, Disposition::Conditional, idx, &g);
        }
        for (q, a) in deferred {
            self.ledger.add_one(q, a);
        }
        // host tracking through the layer
        for (e, h) in self.hosts.iter_mut() {
            if let Some((li, ii, s)) = *h {
                *h = match (z_sign_1q(&layer, e.0), z_sign_1q(&layer, e.1)) {
                    (Some(a), Some(b)) => Some((li, ii, s * a * b)),
                    _ => None,
                };
            }
        }
        self.out.push(layer);
        Ok(())
    }

    fn two_q_layer(&mut self, mut layer: Layer, stretch: f64) -> Result<()> {
        if self.out.last().map(|l| l.kind == LayerKind::TwoQubit).unwrap_or(false) {
            // keep alternation if the input was not well formed
            self.out.push(correction_layer(LayerKind::OneQubit));
        }
        let idx = self.out.len();
        let entries: Vec<_> = self.ledger.two_q.iter().map(|(&e, &a)| (e, a)).collect();
        let mut blocked = Vec::new();
        for (e, a) in entries {
            if a.abs() < TOL {
                self.ledger.two_q.remove(&e);
                continue;
            }
            let host = layer.instructions.iter().position(|i| {
                i.qubits.len() == 2 && absorb_rzz(&i.gate, 0.0).is_some() && {
                    let (p, q) = (i.qubits[0].min(i.qubits[1]), i.qubits[0].max(i.qubits[1]));
                    (p, q) == e
                }
            });
            if let Some(ii) = host {
                let g = absorb_rzz(&layer.instructions[ii].gate, a).expect("host");
                layer.instructions[ii].gate = g.clone();
                self.ledger.two_q.remove(&e);
                self.record(vec![e.0, e.1], a, Disposition::Absorbed, idx, &g);
            } else if !(z_transparent_2q(&layer, e.0) && z_transparent_2q(&layer, e.1)) {
                blocked.push((e, a));
            }
        }
        for (e, a) in blocked {
            self.ledger.two_q.remove(&e);
            self.flush_two(e, a);
        }
        // carried one-qubit entries that the layer does not commute with
        let carried: Vec<_> = self.ledger.one_q.iter().map(|(&q, &a)| (q, a)).collect();
        for (q, a) in carried {
            if !z_transparent_2q(&layer, q) {
                return Err(Error::InvalidCircuit(format!(
                    "Z correction on qubit {q} (angle {a}) cannot pass layer {idx}"
                )));
            }
        }
        if self.out.last().map(|l| l.kind == LayerKind::TwoQubit).unwrap_or(false) {
            self.out.push(correction_layer(LayerKind::OneQubit));
        }
        let idx = self.out.len();
        if layer.role == LayerRole::Normal {
            accumulate_with(&mut self.ledger, &layer, &self.noise, stretch)?;
        }
        for (e, h) in self.hosts.iter_mut() {
            let host = layer.instructions.iter().position(|i| {
                i.qubits.len() == 2
                    && absorb_rzz(&i.gate, 0.0).is_some()
                    && (i.qubits[0].min(i.qubits[1]), i.qubits[0].max(i.qubits[1])) == *e
            });
            *h = match host {
                Some(ii) => Some((idx, ii, 1)),
                None if z_transparent_2q(&layer, e.0) && z_transparent_2q(&layer, e.1) => *h,
                None => None,
            };
        }
        self.out.push(layer);
        Ok(())
    }

    pub(crate) fn run(
        mut self,
        circuit: &ScheduledCircuit,
        stretch: &Stretch,
        mut hook: impl FnMut(&mut Self, usize, &Layer) -> Result<()>,
    ) -> Result<(ScheduledCircuit, CompensationReport)> {
        if !circuit.scheduled {
            return Err(Error::InvalidCircuit("error compensation needs a scheduled circuit".into()));
        }
        for (li, layer) in circuit.layers.iter().enumerate() {
            match layer.kind {
                LayerKind::OneQubit => self.one_q_layer(layer.clone())?,
                LayerKind::TwoQubit => {
                    self.two_q_layer(layer.clone(), stretch.get(&li).copied().unwrap_or(1.0))?;
                    hook(&mut self, li, layer)?;
                }
            }
            self.ledger.prune();
        }
        self.finish(circuit)?;
        let mut sc = ScheduledCircuit::new(circuit.num_qubits);
        sc.scheduled = true;
        sc.layers = self.out;
        let sc = schedule(&sc, self.device)?;
        Ok((sc, self.report))
    }

    fn finish(&mut self, circuit: &ScheduledCircuit) -> Result<()> {
        let measured = measured_at_end(circuit);
        let last = self.out.len().saturating_sub(1);
        let ones: Vec<_> = std::mem::take(&mut self.ledger.one_q).into_iter().collect();
        let mut place = Vec::new();
        for (q, a) in ones {
            if a.abs() < TOL {
                continue;
            }
            if measured[q] {
                self.record(vec![q], a, Disposition::Dropped, last, &Gate::RZ(a));
            } else {
                place.push((q, a));
            }
        }
        let twos: Vec<_> = std::mem::take(&mut self.ledger.two_q).into_iter().collect();
        let mut pending_two = Vec::new();
        for (e, a) in twos {
            if a.abs() < TOL {
                continue;
            }
            if measured[e.0] && measured[e.1] {
                self.record(vec![e.0, e.1], a, Disposition::Dropped, last, &Gate::RZZ(a));
            } else {
                pending_two.push((e, a));
            }
        }
        if !place.is_empty() || !self.pending_cond.is_empty() {
            let l = correction_layer(LayerKind::OneQubit);
            if self.out.last().map(|l| l.kind == LayerKind::OneQubit).unwrap_or(false) {
                // the trailing one-qubit layer already ran; start a fresh pair
                self.out.push(correction_layer(LayerKind::TwoQubit));
            }
            for &(q, a) in &place {
                self.ledger.add_one(q, a);
            }
            self.one_q_layer(l)?;
        }
        for (e, a) in pending_two {
            self.flush_two(e, a);
        }
        Ok(())
    }
}

/// Qubits whose last operation is a measurement.
pub(crate) fn measured_at_end(circuit: &ScheduledCircuit) -> Vec<bool> {
    let mut m = vec![false; circuit.num_qubits];
    for layer in &circuit.layers {
        for i in layer.ops() {
            for &q in &i.qubits {
                m[q] = matches!(i.gate, Gate::Measure { .. });
            }
        }
    }
    m
}

/// Cancels the coherent ZZ and Stark phases of every timed layer, preferring to
/// fold corrections into existing gates and inserting explicit `RZZ` layers only
/// when no host is reachable. Expects a scheduled circuit.
pub fn compensate(circuit: &ScheduledCircuit, device: &DeviceModel) -> Result<(ScheduledCircuit, CompensationReport)> {
    Pass::new(device).run(circuit, &Stretch::new(), |_, _, _| Ok(()))
}

impl Pass<'_> {
    pub(crate) fn ledger_mut(&mut self) -> &mut CompensationLedger {
        &mut self.ledger
    }

    pub(crate) fn add_conditional(&mut self, q: usize, clbit: usize, value: u8, angle: f64) {
        *self.pending_cond.entry((q, clbit, value)).or_insert(0.0) += angle;
    }

    pub(crate) fn drop_entry(&mut self, qubits: Vec<usize>, angle: f64) {
        let layer = self.out.len().saturating_sub(1);
        self.record(qubits, angle, Disposition::Dropped, layer, &Gate::RZ(angle));
    }
}

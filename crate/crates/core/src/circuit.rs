//! Circuit intermediate representation.
//!
//! A [`Circuit`] is an untimed instruction list as read from disk. Passes work
//! on a [`ScheduledCircuit`]: a sequence of [`Layer`]s alternating between
//! one-qubit and two-qubit kind, each carrying absolute start times once
//! scheduled. Two-qubit layers are the timed layers of the circuit: they hold
//! the entangling gates, the delays of idle qubits, measurements and any
//! dynamical-decoupling pulses placed inside idle windows.

use crate::error::{Error, Result};
use crate::math::{gates, Mat2, Mat4};

/// Native and composite operations.
///
/// For two-qubit kinds the instruction's first qubit plays the control role
/// and the second the target role.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    I,
    X,
    Y,
    Z,
    SX,
    RZ(f64),
    RY(f64),
    RZZ(f64),
    U1q { alpha: f64, beta: f64, gamma: f64 },
    UCan { alpha: f64, beta: f64, gamma: f64 },
    Ecr,
    Cnot,
    Measure { clbit: usize },
    Conditional { gate: Box<Gate>, clbit: usize, value: u8 },
    Delay(f64),
    Barrier,
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::I => "id",
            Gate::X => "x",
            Gate::Y => "y",
            Gate::Z => "z",
            Gate::SX => "sx",
            Gate::RZ(_) => "rz",
            Gate::RY(_) => "ry",
            Gate::RZZ(_) => "rzz",
            Gate::U1q { .. } => "u1q",
            Gate::UCan { .. } => "ucan",
            Gate::Ecr => "ecr",
            Gate::Cnot => "cx",
            Gate::Measure { .. } => "measure",
            Gate::Conditional { gate, .. } => gate.name(),
            Gate::Delay(_) => "delay",
            Gate::Barrier => "barrier",
        }
    }

    /// Number of qubits the gate acts on; `None` for barriers (any width).
    pub fn arity(&self) -> Option<usize> {
        match self {
            Gate::RZZ(_) | Gate::UCan { .. } | Gate::Ecr | Gate::Cnot => Some(2),
            Gate::Barrier => None,
            Gate::Conditional { gate, .. } => gate.arity(),
            _ => Some(1),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.arity() == Some(2)
    }

    /// Unitary one-qubit gate (conditionals excluded).
    pub fn is_one_qubit_unitary(&self) -> bool {
        self.matrix1().is_some()
    }

    pub fn is_delay(&self) -> bool {
        matches!(self, Gate::Delay(_))
    }

    /// Zero-duration frame changes.
    pub fn is_virtual(&self) -> bool {
        matches!(self, Gate::I | Gate::Z | Gate::RZ(_) | Gate::Barrier)
    }

    pub fn is_clifford_2q(&self) -> bool {
        matches!(self, Gate::Ecr | Gate::Cnot)
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            Gate::RZ(t) | Gate::RY(t) | Gate::RZZ(t) | Gate::Delay(t) => vec![*t],
            Gate::U1q { alpha, beta, gamma } | Gate::UCan { alpha, beta, gamma } => {
                vec![*alpha, *beta, *gamma]
            }
            Gate::Measure { clbit } => vec![*clbit as f64],
            Gate::Conditional { gate, .. } => gate.params(),
            _ => vec![],
        }
    }

    pub fn matrix1(&self) -> Option<Mat2> {
        Some(match self {
            Gate::I => crate::math::mat2_identity(),
            Gate::X => gates::x(),
            Gate::Y => gates::y(),
            Gate::Z => gates::z(),
            Gate::SX => gates::sx(),
            Gate::RZ(t) => gates::rz(*t),
            Gate::RY(t) => gates::ry(*t),
            Gate::U1q { alpha, beta, gamma } => gates::u1q(*alpha, *beta, *gamma),
            _ => return None,
        })
    }

    pub fn matrix2(&self) -> Option<Mat4> {
        Some(match self {
            Gate::RZZ(t) => gates::rzz(*t),
            Gate::UCan { alpha, beta, gamma } => gates::ucan(*alpha, *beta, *gamma),
            Gate::Ecr | Gate::Cnot => gates::cnot(),
            _ => return None,
        })
    }

    pub fn from_parts(name: &str, params: &[f64]) -> Result<Gate> {
        let need = |n: usize| -> Result<()> {
            if params.len() != n {
                return Err(Error::InvalidCircuit(format!(
                    "`{name}` takes {n} parameters, got {}",
                    params.len()
                )));
            }
            if params.iter().any(|p| !p.is_finite()) {
                return Err(Error::InvalidCircuit(format!("`{name}` has a non-finite parameter")));
            }
            Ok(())
        };
        let g = match name {
            "id" | "i" => Gate::I,
            "x" => Gate::X,
            "y" => Gate::Y,
            "z" => Gate::Z,
            "sx" => Gate::SX,
            "rz" => {
                need(1)?;
                Gate::RZ(params[0])
            }
            "ry" => {
                need(1)?;
                Gate::RY(params[0])
            }
            "rzz" => {
                need(1)?;
                Gate::RZZ(params[0])
            }
            "u1q" => {
                need(3)?;
                Gate::U1q { alpha: params[0], beta: params[1], gamma: params[2] }
            }
            "ucan" => {
                need(3)?;
                Gate::UCan { alpha: params[0], beta: params[1], gamma: params[2] }
            }
            "ecr" => Gate::Ecr,
            "cx" | "cnot" => Gate::Cnot,
            "measure" => {
                need(1)?;
                if params[0] < 0.0 || params[0].fract() != 0.0 {
                    return Err(Error::InvalidCircuit("measure clbit must be a non-negative integer".into()));
                }
                Gate::Measure { clbit: params[0] as usize }
            }
            "delay" => {
                need(1)?;
                if params[0] < 0.0 {
                    return Err(Error::InvalidCircuit("negative delay".into()));
                }
                Gate::Delay(params[0])
            }
            "barrier" => Gate::Barrier,
            "h" => crate::stratify::fuse_matrix(&gates::h())?,
            other => return Err(Error::UnknownGate(other.to_string())),
        };
        Ok(g)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    pub gate: Gate,
    pub qubits: Vec<usize>,
    /// Absolute start in ns; `None` before scheduling.
    pub t_start: Option<f64>,
    pub duration: f64,
}

impl Instruction {
    pub fn new(gate: Gate, qubits: &[usize]) -> Self {
        let duration = if let Gate::Delay(d) = gate { d } else { 0.0 };
        Instruction { gate, qubits: qubits.to_vec(), t_start: None, duration }
    }

    pub fn timed(gate: Gate, qubits: &[usize], t_start: f64, duration: f64) -> Self {
        Instruction { gate, qubits: qubits.to_vec(), t_start: Some(t_start), duration }
    }

    pub fn start(&self) -> f64 {
        self.t_start.unwrap_or(0.0)
    }

    pub fn end(&self) -> f64 {
        self.start() + self.duration
    }
}

/// Untimed instruction list.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit { num_qubits, instructions: Vec::new() }
    }

    pub fn push(&mut self, gate: Gate, qubits: &[usize]) -> &mut Self {
        self.instructions.push(Instruction::new(gate, qubits));
        self
    }

    pub fn validate(&self) -> Result<()> {
        for inst in &self.instructions {
            validate_instruction(inst, self.num_qubits)?;
        }
        Ok(())
    }
}

pub(crate) fn validate_instruction(inst: &Instruction, num_qubits: usize) -> Result<()> {
    if let Some(n) = inst.gate.arity() {
        if inst.qubits.len() != n {
            return Err(Error::InvalidCircuit(format!(
                "`{}` expects {n} qubits, got {}",
                inst.gate.name(),
                inst.qubits.len()
            )));
        }
    }
    for &q in &inst.qubits {
        if q >= num_qubits {
            return Err(Error::InvalidQubit { qubit: q, num_qubits });
        }
    }
    if inst.qubits.len() == 2 && inst.qubits[0] == inst.qubits[1] {
        return Err(Error::InvalidCircuit(format!("`{}` needs distinct qubits", inst.gate.name())));
    }
    if inst.gate.params().iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidCircuit("non-finite angle".into()));
    }
    if let Gate::Conditional { gate, .. } = &inst.gate {
        if !gate.is_one_qubit_unitary() {
            return Err(Error::InvalidCircuit("conditional gates must wrap a one-qubit unitary".into()));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LayerKind {
    OneQubit,
    TwoQubit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LayerRole {
    Normal,
    /// Holds explicit RZZ corrections inserted by error compensation.
    Correction,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub kind: LayerKind,
    pub role: LayerRole,
    pub t_start: f64,
    pub duration: f64,
    pub instructions: Vec<Instruction>,
}

impl Layer {
    pub fn new(kind: LayerKind) -> Self {
        Layer { kind, role: LayerRole::Normal, t_start: 0.0, duration: 0.0, instructions: Vec::new() }
    }

    pub fn end(&self) -> f64 {
        self.t_start + self.duration
    }

    /// Non-delay instructions.
    pub fn ops(&self) -> impl Iterator<Item = &Instruction> {
        self.instructions.iter().filter(|i| !i.gate.is_delay())
    }

    pub fn two_qubit_gates(&self) -> impl Iterator<Item = &Instruction> {
        self.instructions.iter().filter(|i| i.gate.is_two_qubit())
    }

    /// The single non-delay operation on `q` in a one-qubit layer.
    pub fn op_on(&self, q: usize) -> Option<&Instruction> {
        self.ops().find(|i| i.qubits.contains(&q))
    }

    pub fn op_index_on(&self, q: usize) -> Option<usize> {
        self.instructions
            .iter()
            .position(|i| !i.gate.is_delay() && i.qubits.contains(&q))
    }

    pub fn gate_on(&self, q: usize) -> Option<&Instruction> {
        self.two_qubit_gates().find(|i| i.qubits.contains(&q))
    }

    /// Replaces whatever occupies `q` in a one-qubit layer with `gate`.
    ///
    /// In a timed layer a virtual gate takes no time and the rest of the slot
    /// becomes a delay; a physical gate keeps `duration` (default: the whole slot).
    pub fn set_one_qubit_op(&mut self, q: usize, gate: Option<Gate>, timed: bool, duration: Option<f64>) {
        self.instructions.retain(|i| !i.qubits.contains(&q));
        let t = self.t_start;
        let slot = self.duration;
        match gate {
            None if timed && slot > 0.0 => self.instructions.push(Instruction::timed(Gate::Delay(slot), &[q], t, slot)),
            None => {}
            Some(g) if !timed => self.instructions.push(Instruction::new(g, &[q])),
            Some(g) => {
                let d = if g.is_virtual() { 0.0 } else { duration.unwrap_or(slot).min(slot) };
                self.instructions.push(Instruction::timed(g, &[q], t, d));
                if slot - d > 0.0 {
                    self.instructions.push(Instruction::timed(Gate::Delay(slot - d), &[q], t + d, slot - d));
                }
            }
        }
        crate::schedule::sort_instructions(&mut self.instructions);
    }

    pub fn is_active(&self, q: usize) -> bool {
        self.instructions
            .iter()
            .any(|i| !i.gate.is_delay() && !matches!(i.gate, Gate::X) && i.qubits.contains(&q))
            || self.gate_on(q).is_some()
    }
}

/// Layered, optionally timed circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduledCircuit {
    pub num_qubits: usize,
    pub layers: Vec<Layer>,
    /// True once `schedule` has assigned times and delays.
    pub scheduled: bool,
}

impl ScheduledCircuit {
    pub fn new(num_qubits: usize) -> Self {
        ScheduledCircuit { num_qubits, layers: Vec::new(), scheduled: false }
    }

    pub fn makespan(&self) -> f64 {
        self.layers.last().map(|l| l.end()).unwrap_or(0.0)
    }

    /// All instructions ordered by start time (stable within a layer).
    pub fn instructions(&self) -> Vec<&Instruction> {
        let mut v: Vec<&Instruction> = self.layers.iter().flat_map(|l| l.instructions.iter()).collect();
        v.sort_by(|a, b| a.start().partial_cmp(&b.start()).unwrap());
        v
    }

    pub fn num_clbits(&self) -> usize {
        let mut n = 0;
        for l in &self.layers {
            for i in &l.instructions {
                match &i.gate {
                    Gate::Measure { clbit } | Gate::Conditional { clbit, .. } => n = n.max(clbit + 1),
                    _ => {}
                }
            }
        }
        n
    }

    pub fn two_qubit_layer_count(&self) -> usize {
        self.layers.iter().filter(|l| l.kind == LayerKind::TwoQubit).count()
    }

    /// Drops timing information, keeping layer order.
    pub fn to_circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.num_qubits);
        for l in &self.layers {
            for i in l.ops() {
                c.instructions.push(Instruction::new(i.gate.clone(), &i.qubits));
            }
        }
        c
    }

    /// Checks layer alternation, disjoint supports and per-qubit overlap.
    pub fn check_invariants(&self) -> Result<()> {
        for w in self.layers.windows(2) {
            if w[0].kind == w[1].kind {
                return Err(Error::NotStratified("adjacent layers share a kind".into()));
            }
        }
        for (li, l) in self.layers.iter().enumerate() {
            for i in &l.instructions {
                validate_instruction(i, self.num_qubits)?;
                if i.gate.is_two_qubit() && l.kind != LayerKind::TwoQubit {
                    return Err(Error::NotStratified(format!("two-qubit gate in one-qubit layer {li}")));
                }
            }
            let mut per_qubit: Vec<Vec<(f64, f64)>> = vec![Vec::new(); self.num_qubits];
            for i in &l.instructions {
                for &q in &i.qubits {
                    per_qubit[q].push((i.start(), i.end()));
                }
            }
            for (q, spans) in per_qubit.iter_mut().enumerate() {
                spans.sort_by(|a, b| a.partial_cmp(b).unwrap());
                if !self.scheduled && spans.len() > 1 && l.kind == LayerKind::OneQubit {
                    return Err(Error::Overlap { qubit: q, detail: format!("layer {li} has several ops") });
                }
                if self.scheduled {
                    for w in spans.windows(2) {
                        if w[1].0 < w[0].1 - 1e-9 {
                            return Err(Error::Overlap { qubit: q, detail: format!("layer {li}") });
                        }
                    }
                    for s in spans.iter() {
                        if s.0 < l.t_start - 1e-9 || s.1 > l.end() + 1e-9 {
                            return Err(Error::Overlap { qubit: q, detail: format!("escapes layer {li}") });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

use super::state::StateVector;
use crate::circuit::{Gate, ScheduledCircuit};
use crate::error::{Error, Result};
use crate::math::C64;

/// Square matrix in row-major order; basis index bit `q` belongs to qubit `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    pub dim: usize,
    pub data: Vec<C64>,
}

impl DenseMatrix {
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.dim + c]
    }

    /// `|Tr(A† B)| / dim`: 1 exactly when the matrices agree up to global phase.
    pub fn phase_fidelity(&self, other: &DenseMatrix) -> f64 {
        let tr: C64 = self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum();
        tr.norm() / self.dim as f64
    }

    /// Largest entry difference after removing the best global phase.
    pub fn phase_distance(&self, other: &DenseMatrix) -> f64 {
        let tr: C64 = self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum();
        let ph = if tr.norm() > 0.0 { tr / tr.norm() } else { C64::new(1.0, 0.0) };
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a * ph - b).norm())
            .fold(0.0, f64::max)
    }
}

pub const ORACLE_MAX_QUBITS: usize = 10;

/// Noiseless unitary of the circuit in layer order.
pub fn unitary_oracle(circuit: &ScheduledCircuit) -> Result<DenseMatrix> {
    let n = circuit.num_qubits;
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::TooManyQubits { num_qubits: n, limit: ORACLE_MAX_QUBITS });
    }
    for l in &circuit.layers {
        for i in &l.instructions {
            if matches!(i.gate, Gate::Measure { .. } | Gate::Conditional { .. }) {
                return Err(Error::InvalidCircuit("unitary oracle needs a measurement-free circuit".into()));
            }
        }
    }
    let dim = 1usize << n;
    let mut data = vec![C64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let mut s = StateVector::basis(n, col);
        for l in &circuit.layers {
            for i in &l.instructions {
                s.apply_instruction(i)?;
            }
        }
        for (row, a) in s.amps.iter().enumerate() {
            data[row * dim + col] = *a;
        }
    }
    Ok(DenseMatrix { dim, data })
}

/// Unitary of the circuit including the coherent noise of `noise`.
///
/// Only deterministic noise is allowed: charge-parity terms would make the
/// evolution a mixture.
pub fn noisy_unitary(circuit: &ScheduledCircuit, noise: &super::NoiseModel) -> Result<DenseMatrix> {
    let n = circuit.num_qubits;
    if n > ORACLE_MAX_QUBITS {
        return Err(Error::TooManyQubits { num_qubits: n, limit: ORACLE_MAX_QUBITS });
    }
    if !noise.parity.is_empty() {
        return Err(Error::InvalidCircuit("noisy unitary needs deterministic noise".into()));
    }
    let dim = 1usize << n;
    let mut data = vec![C64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let r = super::state::simulate_from(circuit, noise, super::Mode::Exact, StateVector::basis(n, col))?;
        let s = r
            .state()
            .ok_or_else(|| Error::InvalidCircuit("noisy unitary needs a measurement-free circuit".into()))?;
        for (row, a) in s.amps.iter().enumerate() {
            data[row * dim + col] = *a;
        }
    }
    Ok(DenseMatrix { dim, data })
}

use super::timeline::{layer_noise, LayerNoise};
use super::NoiseModel;
use crate::circuit::{Gate, Instruction, LayerKind, LayerRole, ScheduledCircuit};
use crate::error::{Error, Result};
use crate::math::{Mat2, Mat4, C64};
use crate::pauli::{Pauli, PauliString};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub const MAX_QUBITS: usize = 14;

/// Dense state; qubit `q` is bit `q` of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub num_qubits: usize,
    pub amps: Vec<C64>,
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        StateVector { num_qubits: n, amps }
    }

    /// Product state from one-qubit vectors `(a0, a1)` per qubit.
    pub fn product(qubits: &[[C64; 2]]) -> Self {
        let n = qubits.len();
        let amps = (0..1usize << n)
            .map(|i| (0..n).map(|q| qubits[q][(i >> q) & 1]).product())
            .collect();
        StateVector { num_qubits: n, amps }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|<self|other>|^2`
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn apply_1q(&mut self, q: usize, m: &Mat2) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let j = i | bit;
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[j] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    /// `m` indexes its basis as `2 * bit(q0) + bit(q1)`.
    pub fn apply_2q(&mut self, q0: usize, q1: usize, m: &Mat4) {
        let (b0, b1) = (1usize << q0, 1usize << q1);
        for i in 0..self.amps.len() {
            if i & (b0 | b1) == 0 {
                let idx = [i, i | b1, i | b0, i | b0 | b1];
                let v = idx.map(|k| self.amps[k]);
                for (r, &k) in idx.iter().enumerate() {
                    self.amps[k] = (0..4).map(|c| m[r][c] * v[c]).sum();
                }
            }
        }
    }

    /// Applies `prod RZZ(zz) * prod RZ(z)`.
    pub fn apply_diagonal(&mut self, zz: &[(usize, usize, f64)], z: &[f64]) {
        let zs: Vec<(usize, f64)> = z.iter().copied().enumerate().filter(|p| p.1 != 0.0).collect();
        let zzs: Vec<&(usize, usize, f64)> = zz.iter().filter(|e| e.2 != 0.0).collect();
        if zs.is_empty() && zzs.is_empty() {
            return;
        }
        for (i, a) in self.amps.iter_mut().enumerate() {
            let sgn = |q: usize| if (i >> q) & 1 == 0 { 1.0 } else { -1.0 };
            let mut phi = 0.0;
            for &&(p, q, ang) in &zzs {
                phi += ang * sgn(p) * sgn(q);
            }
            for &(q, ang) in &zs {
                phi += ang * sgn(q);
            }
            *a *= C64::from_polar(1.0, -0.5 * phi);
        }
    }

    pub fn apply_pauli(&mut self, p: &PauliString) {
        for (q, s) in p.symbols.iter().enumerate() {
            if *s != Pauli::I {
                self.apply_1q(q, &s.matrix());
            }
        }
        let ph = p.phase_value();
        for a in &mut self.amps {
            *a *= ph;
        }
    }

    /// `<psi| P |psi>` with `p.symbols[q]` acting on qubit `q`.
    pub fn expectation(&self, p: &PauliString) -> f64 {
        let mut w = self.clone();
        w.apply_pauli(p);
        self.inner(&w).re
    }

    pub fn prob_one(&self, q: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> q) & 1 == 1)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Probability that `qubits` read the given bit values.
    pub fn prob_bits(&self, qubits: &[usize], values: &[u8]) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| qubits.iter().zip(values).all(|(&q, &v)| ((i >> q) & 1) as u8 == v))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn project(&mut self, q: usize, outcome: u8) -> f64 {
        let mut p = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i >> q) & 1) as u8 == outcome {
                p += a.norm_sqr();
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
        if p > 0.0 {
            let s = 1.0 / p.sqrt();
            for a in &mut self.amps {
                *a *= s;
            }
        }
        p
    }

    /// Applies a unitary instruction; delays and barriers are no-ops.
    pub fn apply_instruction(&mut self, inst: &Instruction) -> Result<()> {
        let g = &inst.gate;
        if let Some(m) = g.matrix1() {
            self.apply_1q(inst.qubits[0], &m);
        } else if let Some(m) = g.matrix2() {
            self.apply_2q(inst.qubits[0], inst.qubits[1], &m);
        } else if !matches!(g, Gate::Delay(_) | Gate::Barrier) {
            return Err(Error::InvalidCircuit(format!("`{}` is not unitary", g.name())));
        }
        Ok(())
    }
}

/// One measurement / parity history with its probability weight.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub weight: f64,
    pub state: StateVector,
    pub clbits: Vec<u8>,
    /// Charge-parity sign per listed parity qubit.
    pub parity_signs: Vec<i8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Shots { shots: u64, seed: u64 },
}

/// Outcome counts keyed by bit strings, bit 0 leftmost.
pub type ShotCounts = BTreeMap<String, u64>;

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub branches: Vec<Branch>,
    pub counts: Option<ShotCounts>,
}

impl SimResult {
    /// Single final state of a branch-free run.
    pub fn state(&self) -> Option<&StateVector> {
        if self.branches.len() == 1 {
            Some(&self.branches[0].state)
        } else {
            None
        }
    }

    pub fn expectation(&self, p: &PauliString) -> f64 {
        self.branches.iter().map(|b| b.weight * b.state.expectation(p)).sum()
    }

    pub fn prob_bits(&self, qubits: &[usize], values: &[u8]) -> f64 {
        self.branches.iter().map(|b| b.weight * b.state.prob_bits(qubits, values)).sum()
    }

    /// Average `|<target|psi_b>|^2` over branches.
    pub fn fidelity(&self, target: &StateVector) -> f64 {
        self.branches.iter().map(|b| b.weight * target.overlap(&b.state)).sum()
    }

    /// Outcome distribution over classical bits, or over all qubits if none were measured.
    pub fn distribution(&self) -> BTreeMap<String, f64> {
        let mut d = BTreeMap::new();
        for b in &self.branches {
            if !b.clbits.is_empty() {
                let key: String = b.clbits.iter().map(|v| char::from(b'0' + v)).collect();
                *d.entry(key).or_insert(0.0) += b.weight;
            } else {
                let n = b.state.num_qubits;
                for (i, a) in b.state.amps.iter().enumerate() {
                    let p = b.weight * a.norm_sqr();
                    if p > 1e-15 {
                        let key: String = (0..n).map(|q| if (i >> q) & 1 == 1 { '1' } else { '0' }).collect();
                        *d.entry(key).or_insert(0.0) += p;
                    }
                }
            }
        }
        d
    }
}

const PRUNE: f64 = 1e-14;

/// Simulates from `|0...0>`.
pub fn simulate(circuit: &ScheduledCircuit, noise: &NoiseModel, mode: Mode) -> Result<SimResult> {
    simulate_from(circuit, noise, mode, StateVector::zero(circuit.num_qubits))
}

pub fn simulate_ideal(circuit: &ScheduledCircuit) -> Result<SimResult> {
    simulate(circuit, &NoiseModel::noiseless(circuit.num_qubits), Mode::Exact)
}

pub fn simulate_from(circuit: &ScheduledCircuit, noise: &NoiseModel, mode: Mode, init: StateVector) -> Result<SimResult> {
    let n = circuit.num_qubits;
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits { num_qubits: n, limit: MAX_QUBITS });
    }
    if init.num_qubits != n {
        return Err(Error::InvalidCircuit("initial state width differs from circuit".into()));
    }
    let noisy = !noise.is_noiseless();
    if noisy && !circuit.scheduled {
        return Err(Error::InvalidCircuit("noisy simulation needs a scheduled circuit".into()));
    }
    if noise.num_qubits != n {
        return Err(Error::InvalidCircuit(format!(
            "noise model has {} qubits, circuit {n}",
            noise.num_qubits
        )));
    }
    let nclbits = circuit.num_clbits();
    let timeline: Vec<Option<LayerNoise>> = circuit
        .layers
        .iter()
        .enumerate()
        .map(|(i, l)| {
            if noisy && l.kind == LayerKind::TwoQubit && l.role == LayerRole::Normal {
                layer_noise(l, i, noise).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_>>()?;
    let k = noise.parity.len();
    if k > 16 {
        return Err(Error::Config("too many charge-parity terms for exact enumeration".into()));
    }
    let mut branches: Vec<Branch> = (0..1usize << k)
        .map(|pattern| Branch {
            weight: 1.0 / (1u64 << k) as f64,
            state: init.clone(),
            clbits: vec![0; nclbits],
            parity_signs: (0..k).map(|j| if (pattern >> j) & 1 == 0 { 1 } else { -1 }).collect(),
        })
        .collect();
    for (layer, ln) in circuit.layers.iter().zip(&timeline) {
        // measurements act at the start of their layer
        for inst in &layer.instructions {
            if let Gate::Measure { clbit } = inst.gate {
                let q = inst.qubits[0];
                let mut next = Vec::with_capacity(branches.len() * 2);
                for b in branches {
                    let p1 = b.state.prob_one(q);
                    for (outcome, p) in [(0u8, 1.0 - p1), (1u8, p1)] {
                        if b.weight * p > PRUNE {
                            let mut nb = b.clone();
                            nb.state.project(q, outcome);
                            nb.weight *= p;
                            nb.clbits[clbit] = outcome;
                            next.push(nb);
                        }
                    }
                }
                branches = next;
            }
        }
        for b in &mut branches {
            for inst in &layer.instructions {
                match &inst.gate {
                    Gate::Measure { .. } => {}
                    Gate::Conditional { gate, clbit, value } => {
                        if b.clbits.get(*clbit).copied().unwrap_or(0) == *value {
                            b.state.apply_instruction(&Instruction::new((**gate).clone(), &inst.qubits))?;
                        }
                    }
                    _ => b.state.apply_instruction(inst)?,
                }
            }
            if let Some(ln) = ln {
                let mut z = ln.z.clone();
                for (j, &(q, _)) in noise.parity.iter().enumerate() {
                    z[q] += b.parity_signs[j] as f64 * ln.parity[q];
                }
                b.state.apply_diagonal(&ln.zz, &z);
            }
        }
    }
    let counts = match mode {
        Mode::Exact => None,
        Mode::Shots { shots, seed } => {
            let res = SimResult { branches, counts: None };
            let dist = res.distribution();
            let counts = sample(&dist, shots, seed);
            return Ok(SimResult { branches: res.branches, counts: Some(counts) });
        }
    };
    Ok(SimResult { branches, counts })
}

fn sample(dist: &BTreeMap<String, f64>, shots: u64, seed: u64) -> ShotCounts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keys: Vec<&String> = dist.keys().collect();
    let mut cum = Vec::with_capacity(keys.len());
    let mut acc = 0.0;
    for k in &keys {
        acc += dist[*k];
        cum.push(acc);
    }
    let mut counts = ShotCounts::new();
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * acc;
        let i = cum.partition_point(|&c| c <= u).min(keys.len() - 1);
        *counts.entry(keys[i].clone()).or_insert(0) += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;
    use crate::device::DeviceModel;
    use crate::schedule::schedule;
    use crate::stratify::stratify;

    fn bell() -> Circuit {
        let mut c = Circuit::new(2);
        c.push(Gate::RY(std::f64::consts::FRAC_PI_2), &[0]).push(Gate::Cnot, &[0, 1]);
        c
    }

    #[test]
    fn noiseless_bell() {
        let s = stratify(&bell()).unwrap();
        let r = simulate_ideal(&s).unwrap();
        let st = r.state().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((st.amps[0].re - h).abs() < 1e-12 && (st.amps[3].re - h).abs() < 1e-12);
        assert!(st.amps[1].norm() < 1e-12 && st.amps[2].norm() < 1e-12);
    }

    #[test]
    fn zero_rate_noise_equals_ideal() {
        let dev = DeviceModel::line(2, 0.0);
        let s = schedule(&stratify(&bell()).unwrap(), &dev).unwrap();
        let a = simulate(&s, &NoiseModel::coherent(&dev), Mode::Exact).unwrap();
        let b = simulate_ideal(&s).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn measurement_branches_and_shots() {
        let mut c = bell();
        c.push(Gate::Measure { clbit: 0 }, &[0]).push(Gate::Measure { clbit: 1 }, &[1]);
        let dev = DeviceModel::line(2, 5e4);
        let s = schedule(&stratify(&c).unwrap(), &dev).unwrap();
        let r = simulate(&s, &NoiseModel::coherent(&dev), Mode::Shots { shots: 1000, seed: 1 }).unwrap();
        assert_eq!(r.branches.len(), 2);
        let counts = r.counts.unwrap();
        assert_eq!(counts.keys().cloned().collect::<Vec<_>>(), vec!["00".to_string(), "11".to_string()]);
        assert_eq!(counts.values().sum::<u64>(), 1000);
        let again = simulate(&s, &NoiseModel::coherent(&dev), Mode::Shots { shots: 1000, seed: 1 }).unwrap();
        assert_eq!(again.counts.unwrap(), counts);
    }

    #[test]
    fn too_many_qubits() {
        let s = ScheduledCircuit::new(MAX_QUBITS + 1);
        assert!(matches!(
            simulate_ideal(&s),
            Err(Error::TooManyQubits { .. })
        ));
    }
}

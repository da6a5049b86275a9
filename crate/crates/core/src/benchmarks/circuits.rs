//! Fixture devices and application circuits.

use crate::circuit::{Circuit, Gate};
use crate::device::{ChargeParity, CouplingKind, DeviceModel, StarkTerm};
use rand::Rng;

fn hadamard() -> Gate {
    Gate::from_parts("h", &[]).expect("h is a known gate")
}

fn line_with_rates(rates_khz: &[f64]) -> DeviceModel {
    let mut d = DeviceModel::new(rates_khz.len() + 1);
    for (q, r) in rates_khz.iter().enumerate() {
        d.add_coupling(q, q + 1, r * 1e3, CouplingKind::NearestNeighbor);
    }
    d
}

/// 6-qubit line for the Ising and combined benchmarks.
pub fn ising_device() -> DeviceModel {
    let mut d = line_with_rates(&[52.0, 38.0, 61.0, 45.0, 57.0]);
    d.stark_terms.push(StarkTerm { driven_pair: (1, 2), spectator: 0, shift_hz: 2.0e4 });
    d
}

/// 12-qubit ring for the Heisenberg benchmark.
pub fn heisenberg_device() -> DeviceModel {
    let rates = [48.0, 55.0, 41.0, 63.0, 50.0, 37.0, 58.0, 44.0, 52.0, 60.0, 39.0, 47.0];
    let mut d = DeviceModel::new(12);
    for (q, r) in rates.iter().enumerate() {
        d.add_coupling(q, (q + 1) % 12, r * 1e3, CouplingKind::NearestNeighbor);
    }
    d
}

/// 10-qubit line hosting the layer-fidelity layout.
pub fn layer_fidelity_device() -> DeviceModel {
    line_with_rates(&[46.0, 58.0, 40.0, 54.0, 62.0, 43.0, 50.0, 57.0, 48.0])
}

/// 3-qubit chain: ancilla 0, data 1 and 2.
pub fn bell_device() -> DeviceModel {
    line_with_rates(&[60.0, 45.0])
}

/// Ising line plus charge-parity splitting on qubits 1 and 2.
pub fn combo_device() -> DeviceModel {
    let mut d = line_with_rates(&[52.0, 38.0, 61.0, 45.0, 57.0]);
    d.charge_parity.push(ChargeParity { qubit: 1, delta_hz: 1.2e4 });
    d.charge_parity.push(ChargeParity { qubit: 2, delta_hz: 0.9e4 });
    d
}

/// Three mutually coupled qubits: two nearest-neighbour edges and one weaker
/// next-nearest-neighbour edge (0, 2).
pub fn triangle_device() -> DeviceModel {
    let mut d = DeviceModel::new(3);
    d.add_coupling(0, 1, 6.0e4, CouplingKind::NearestNeighbor);
    d.add_coupling(1, 2, 5.0e4, CouplingKind::NearestNeighbor);
    d.add_coupling(0, 2, 1.5e4, CouplingKind::NextNearestNeighbor);
    d
}

/// Floquet Ising chain at the Clifford point: `d` steps of two ECR layers and
/// one echo layer, boundary qubits in `|+>`. Ideally `<X0 X5> = 1` at every depth.
pub fn ising_circuit(d: usize) -> Circuit {
    let mut c = Circuit::new(6);
    c.push(hadamard(), &[0]).push(hadamard(), &[5]);
    for _ in 0..d {
        c.push(Gate::Barrier, &[]);
        c.push(Gate::Ecr, &[1, 0]).push(Gate::Ecr, &[2, 3]).push(Gate::Ecr, &[4, 5]);
        c.push(Gate::Barrier, &[]);
        c.push(Gate::Ecr, &[1, 2]).push(Gate::Ecr, &[3, 4]);
        c.push(Gate::Barrier, &[]);
        c.push(Gate::Y, &[0]);
        for q in 1..5 {
            c.push(Gate::X, &[q]);
        }
        c.push(Gate::Y, &[5]);
    }
    c
}

/// Edge layers of one Trotter step on the 12-ring.
pub const HEISENBERG_LAYERS: [[(usize, usize); 4]; 3] = [
    [(0, 1), (2, 3), (6, 7), (8, 9)],
    [(1, 2), (4, 5), (7, 8), (10, 11)],
    [(3, 4), (5, 6), (9, 10), (11, 0)],
];

/// First-order Trotter evolution of the isotropic-or-not Heisenberg ring from
/// a Neel state, `d` steps of length `t`.
pub fn heisenberg_circuit(d: usize, j: [f64; 3], t: f64) -> Circuit {
    let mut c = Circuit::new(12);
    for q in (1..12).step_by(2) {
        c.push(Gate::X, &[q]);
    }
    let g = Gate::UCan { alpha: -j[0] * t / 2.0, beta: -j[1] * t / 2.0, gamma: -j[2] * t / 2.0 };
    for _ in 0..d {
        for layer in HEISENBERG_LAYERS {
            c.push(Gate::Barrier, &[]);
            for (a, b) in layer {
                c.push(g.clone(), &[a, b]);
            }
        }
    }
    c
}

/// Three ECRs and four idle qubits on the 10-qubit line: adjacent controls
/// (1, 2), idle pairs (4, 5) and (8, 9).
pub fn layer_fidelity_layer() -> Circuit {
    let mut c = Circuit::new(10);
    c.push(Gate::Ecr, &[1, 0]).push(Gate::Ecr, &[2, 3]).push(Gate::Ecr, &[6, 7]);
    c
}

/// GHZ on the chain, X-basis measurement of the ancilla with a conditional Z
/// on data qubit 1, then the disentangling CNOT + H so the ideal data state is `|00>`.
pub fn bell_dynamic_circuit() -> Circuit {
    let mut c = Circuit::new(3);
    c.push(hadamard(), &[0]);
    c.push(Gate::Cnot, &[0, 1]).push(Gate::Cnot, &[1, 2]);
    c.push(hadamard(), &[0]);
    c.push(Gate::Measure { clbit: 0 }, &[0]);
    c.push(Gate::Conditional { gate: Box::new(Gate::Z), clbit: 0, value: 1 }, &[1]);
    c.push(Gate::Cnot, &[1, 2]);
    c.push(hadamard(), &[1]);
    c
}

/// Floquet circuit for the combined strategy: all qubits in `|+>`, each step
/// applies CNOT(1,0) CNOT(2,3) twice and ECR(4,5) twice. Ideally `P00` on (1, 2)
/// after Hadamards is 1.
pub fn combo_circuit(d: usize) -> Circuit {
    let mut c = Circuit::new(6);
    for q in 0..6 {
        c.push(hadamard(), &[q]);
    }
    for _ in 0..d {
        for _ in 0..2 {
            c.push(Gate::Barrier, &[]);
            c.push(Gate::Cnot, &[1, 0]).push(Gate::Cnot, &[2, 3]);
        }
        for _ in 0..2 {
            c.push(Gate::Barrier, &[]);
            c.push(Gate::Ecr, &[4, 5]);
        }
    }
    c.push(Gate::Barrier, &[]);
    c.push(hadamard(), &[1]).push(hadamard(), &[2]);
    c
}

/// Random layered circuit on the coupling edges of `device`: each step draws a
/// random one-qubit gate (or nothing) per qubit, then a random matching of
/// edges carrying gates from `two_qubit` in random orientation.
pub fn random_circuit<R: Rng>(device: &DeviceModel, steps: usize, two_qubit: &[Gate], rng: &mut R) -> Circuit {
    let n = device.num_qubits;
    let mut c = Circuit::new(n);
    let edges: Vec<(usize, usize)> = device.couplings.iter().map(|e| (e.q0, e.q1)).collect();
    for _ in 0..steps {
        for q in 0..n {
            let g = match rng.gen_range(0..6) {
                0 => continue,
                1 => Gate::X,
                2 => Gate::SX,
                3 => Gate::RZ(rng.gen_range(-3.0..3.0)),
                _ => Gate::U1q {
                    alpha: rng.gen_range(-3.0..3.0),
                    beta: rng.gen_range(0.0..3.0),
                    gamma: rng.gen_range(-3.0..3.0),
                },
            };
            c.push(g, &[q]);
        }
        if two_qubit.is_empty() || edges.is_empty() {
            continue;
        }
        let mut used = vec![false; n];
        let start = rng.gen_range(0..edges.len());
        for k in 0..edges.len() {
            let (a, b) = edges[(start + k) % edges.len()];
            if used[a] || used[b] || !rng.gen_bool(0.6) {
                continue;
            }
            used[a] = true;
            used[b] = true;
            let g = two_qubit[rng.gen_range(0..two_qubit.len())].clone();
            if rng.gen_bool(0.5) {
                c.push(g, &[a, b]);
            } else {
                c.push(g, &[b, a]);
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;
    use crate::sim::simulate_ideal;
    use crate::stratify::stratify;

    #[test]
    fn ising_ideal_is_one() {
        let p = PauliString::parse("XIIIIX").unwrap();
        for d in 0..6 {
            let r = simulate_ideal(&stratify(&ising_circuit(d)).unwrap()).unwrap();
            assert!((r.expectation(&p) - 1.0).abs() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn random_circuit_respects_coupling_map() {
        use rand::SeedableRng;
        let dev = DeviceModel::heavy_hex_patch(5e4);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let c = random_circuit(&dev, 10, &[Gate::Ecr], &mut rng);
        let n2 = c.instructions.iter().filter(|i| i.gate.is_two_qubit()).count();
        assert!(n2 > 10);
        for i in c.instructions.iter().filter(|i| i.gate.is_two_qubit()) {
            let (a, b) = (i.qubits[0], i.qubits[1]);
            assert!(dev.couplings.iter().any(|e| (e.q0, e.q1) == (a, b) || (e.q0, e.q1) == (b, a)));
        }
    }

    #[test]
    fn heisenberg_layer_count() {
        let s = stratify(&heisenberg_circuit(15, [1.0; 3], 0.3)).unwrap();
        assert_eq!(s.two_qubit_layer_count(), 45);
    }

    #[test]
    fn combo_and_bell_ideal() {
        let r = simulate_ideal(&stratify(&combo_circuit(3)).unwrap()).unwrap();
        assert!((r.prob_bits(&[1, 2], &[0, 0]) - 1.0).abs() < 1e-12);
        let r = simulate_ideal(&stratify(&bell_dynamic_circuit()).unwrap()).unwrap();
        assert!((r.prob_bits(&[1, 2], &[0, 0]) - 1.0).abs() < 1e-12);
    }
}

use super::compensate::{CompensationReport, Pass, Stretch};
use crate::circuit::{Gate, LayerKind, ScheduledCircuit};
use crate::device::DeviceModel;
use crate::error::{Error, Result};

/// Compensation for circuits with mid-circuit measurement and feedforward.
///
/// The measure-and-feedforward window is assumed to last
/// `measure_ns + feedforward_estimate_ns`. After the measurement the ancilla
/// is in a basis state, so ZZ towards a neighbour acts as a Z on that neighbour
/// whose sign depends on the outcome: the correction becomes an RZ conditioned
/// on the measured bit. Phases on the measured qubit itself are dropped.
pub fn compensate_dynamic(
    circuit: &ScheduledCircuit,
    device: &DeviceModel,
    feedforward_estimate_ns: Option<f64>,
) -> Result<(ScheduledCircuit, CompensationReport)> {
    let conditioned: Vec<usize> = circuit
        .layers
        .iter()
        .flat_map(|l| l.ops())
        .filter_map(|i| match i.gate {
            Gate::Conditional { clbit, .. } => Some(clbit),
            _ => None,
        })
        .collect();
    let has_feedforward = circuit.layers.iter().flat_map(|l| l.ops()).any(|i| match i.gate {
        Gate::Measure { clbit } => conditioned.contains(&clbit),
        _ => false,
    });
    if !has_feedforward {
        return Err(Error::MissingCondition);
    }
    let ff = match feedforward_estimate_ns {
        Some(f) => f,
        None => device.feedforward_ns()?,
    };
    let tau_est = device.measure_ns()? + ff;
    let mut stretch = Stretch::new();
    for (li, l) in circuit.layers.iter().enumerate() {
        if l.kind == LayerKind::TwoQubit && l.ops().any(|i| matches!(i.gate, Gate::Measure { .. })) && l.duration > 0.0 {
            stretch.insert(li, tau_est / l.duration);
        }
    }
    let edges: Vec<(usize, usize)> = crate::device::build_interaction_graph(device)
        .edge_pairs()
        .into_iter()
        .collect();
    Pass::new(device).run(circuit, &stretch, |pass, _, layer| {
        let measured: Vec<(usize, usize)> = layer
            .ops()
            .filter_map(|i| match i.gate {
                Gate::Measure { clbit } => Some((i.qubits[0], clbit)),
                _ => None,
            })
            .collect();
        for &(a, clbit) in &measured {
            for &(p, q) in &edges {
                let other = if p == a { q } else if q == a { p } else { continue };
                if measured.iter().any(|&(m, _)| m == other) {
                    continue;
                }
                let e = (a.min(other), a.max(other));
                let phi = pass.ledger_mut().take_two(e);
                if phi == 0.0 {
                    continue;
                }
                // RZZ(phi) on |m> x psi  ==  RZ(phi) on psi, then RZ(-2 phi) if m = 1
                pass.ledger_mut().add_one(other, phi);
                pass.add_conditional(other, clbit, 1, -2.0 * phi);
            }
            let own = pass.ledger_mut().take_one(a);
            if own != 0.0 {
                pass.drop_entry(vec![a], own);
            }
        }
        Ok(())
    })
}

//! ASAP scheduling with whole-layer alignment.

use crate::circuit::{Gate, Instruction, Layer, LayerKind, LayerRole, ScheduledCircuit};
use crate::device::DeviceModel;
use crate::error::Result;

/// Assigns start times layer by layer and pads idle time with `Delay`s.
///
/// Two-qubit layers that are already timed (for example after decoupling
/// pulses were inserted) are shifted rigidly instead of being re-timed.
pub fn schedule(circuit: &ScheduledCircuit, device: &DeviceModel) -> Result<ScheduledCircuit> {
    let x_ns = device.x_ns()?;
    let mut out = ScheduledCircuit::new(circuit.num_qubits);
    out.scheduled = true;
    let mut t = 0.0;
    for layer in &circuit.layers {
        let keep = circuit.scheduled
            && layer.kind == LayerKind::TwoQubit
            && layer.instructions.iter().all(|i| i.t_start.is_some())
            && layer.instructions.iter().any(|i| !i.gate.is_delay());
        let new = if keep {
            shift_layer(layer, t)
        } else {
            time_layer(layer, circuit.num_qubits, device, t, x_ns)?
        };
        t = new.end();
        out.layers.push(new);
    }
    Ok(out)
}

fn shift_layer(layer: &Layer, t: f64) -> Layer {
    let dt = t - layer.t_start;
    let mut l = layer.clone();
    l.t_start = t;
    for i in &mut l.instructions {
        i.t_start = Some(i.start() + dt);
    }
    l
}

fn time_layer(layer: &Layer, n: usize, device: &DeviceModel, t: f64, x_ns: f64) -> Result<Layer> {
    let mut ops: Vec<Instruction> = Vec::new();
    // correction one-qubit layers only hold what was put there; normal ones keep a pulse slot
    let slot = layer.kind == LayerKind::OneQubit && layer.role == LayerRole::Normal;
    let mut duration: f64 = if slot { x_ns } else { 0.0 };
    for i in &layer.instructions {
        let d = device.duration(&i.gate)?;
        duration = duration.max(d);
        if !i.gate.is_delay() {
            ops.push(Instruction::timed(i.gate.clone(), &i.qubits, t, d));
        }
    }
    let mut busy_until = vec![None; n];
    for op in &ops {
        for &q in &op.qubits {
            busy_until[q] = Some(op.end());
        }
    }
    let mut instructions = ops;
    for (q, b) in busy_until.iter().enumerate() {
        let from = b.unwrap_or(t);
        let gap = t + duration - from;
        if gap > 0.0 {
            instructions.push(Instruction::timed(Gate::Delay(gap), &[q], from, gap));
        }
    }
    sort_instructions(&mut instructions);
    Ok(Layer { kind: layer.kind, role: layer.role, t_start: t, duration, instructions })
}

/// Canonical order inside a layer: by start time, then first qubit.
pub fn sort_instructions(v: &mut [Instruction]) {
    v.sort_by(|a, b| {
        a.start()
            .partial_cmp(&b.start())
            .unwrap()
            .then(a.qubits[0].cmp(&b.qubits[0]))
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;
    use crate::stratify::stratify;

    fn delays_on(l: &Layer, q: usize) -> Vec<(f64, f64)> {
        l.instructions
            .iter()
            .filter(|i| i.gate.is_delay() && i.qubits == [q])
            .map(|i| (i.start(), i.duration))
            .collect()
    }

    #[test]
    fn single_gap() {
        let mut c = Circuit::new(2);
        c.push(Gate::X, &[0]);
        let s = schedule(&stratify(&c).unwrap(), &DeviceModel::line(2, 0.0)).unwrap();
        let l = &s.layers[0];
        assert_eq!(l.op_on(0).unwrap().start(), 0.0);
        assert_eq!(delays_on(l, 1), vec![(0.0, 35.0)]);
    }

    #[test]
    fn layer_padding() {
        let mut c = Circuit::new(3);
        c.push(Gate::Ecr, &[0, 1]);
        let s = schedule(&stratify(&c).unwrap(), &DeviceModel::line(3, 0.0)).unwrap();
        assert_eq!(delays_on(&s.layers[0], 2), vec![(0.0, 500.0)]);
        assert_eq!(s.makespan(), 500.0);
        s.check_invariants().unwrap();
    }

    #[test]
    fn missing_duration() {
        let mut c = Circuit::new(2);
        c.push(Gate::Ecr, &[0, 1]);
        let mut d = DeviceModel::line(2, 0.0);
        d.durations.ecr_ns = None;
        assert!(matches!(schedule(&stratify(&c).unwrap(), &d), Err(crate::Error::MissingDuration(_))));
    }

    #[test]
    fn virtual_gates_padded() {
        let mut c = Circuit::new(1);
        c.push(Gate::RZ(0.3), &[0]);
        let s = schedule(&stratify(&c).unwrap(), &DeviceModel::line(1, 0.0)).unwrap();
        assert_eq!(delays_on(&s.layers[0], 0), vec![(0.0, 35.0)]);
        // correction layers carrying frame changes take no time
        let mut s = stratify(&c).unwrap();
        s.layers[0].role = crate::circuit::LayerRole::Correction;
        assert_eq!(schedule(&s, &DeviceModel::line(1, 0.0)).unwrap().makespan(), 0.0);
    }
}

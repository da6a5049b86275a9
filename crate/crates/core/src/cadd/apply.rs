use super::coloring::Coloring;
use super::delays::DelayInterval;
use super::walsh::walsh_sequence;
use crate::circuit::{Gate, Instruction, ScheduledCircuit};
use crate::error::{Error, Result};
use crate::schedule::sort_instructions;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DdInsertion {
    pub qubits: Vec<usize>,
    pub t_start: f64,
    pub t_end: f64,
    pub colors: BTreeMap<usize, usize>,
    pub pulses: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DdReport {
    pub inserted: Vec<DdInsertion>,
    /// Intervals left untouched, with the reason.
    pub skipped: Vec<(DelayInterval, String)>,
}

/// Replaces each colored idle window with its Walsh delay/X alternation.
pub fn apply_dd(
    circuit: &ScheduledCircuit,
    intervals: &[DelayInterval],
    colorings: &[Coloring],
    pulse_ns: f64,
) -> Result<(ScheduledCircuit, DdReport)> {
    if !circuit.scheduled {
        return Err(Error::InvalidCircuit("decoupling needs a scheduled circuit".into()));
    }
    let mut out = circuit.clone();
    let mut report = DdReport::default();
    for col in colorings {
        let iv = intervals
            .get(col.interval)
            .ok_or_else(|| Error::InvalidCircuit(format!("coloring references interval {}", col.interval)))?;
        let dur = iv.duration();
        let mut seqs = BTreeMap::new();
        let mut failure = None;
        for (&q, &c) in &col.colors {
            match walsh_sequence(c, dur, pulse_ns) {
                Ok(s) => {
                    seqs.insert(q, s);
                }
                Err(e @ Error::TooShort { .. }) => failure = Some(e.to_string()),
                Err(e) => return Err(e),
            }
        }
        if let Some(reason) = failure {
            log::warn!("skipping interval at {} ns: {reason}", iv.t_start);
            report.skipped.push((iv.clone(), reason));
            continue;
        }
        let mut pulses = 0;
        for (&q, seq) in &seqs {
            let layer = out
                .layers
                .iter_mut()
                .find(|l| l.t_start <= iv.t_start + 1e-9 && iv.t_end <= l.end() + 1e-9)
                .ok_or_else(|| Error::InvalidCircuit("interval outside every layer".into()))?;
            let pos = layer
                .instructions
                .iter()
                .position(|i| {
                    i.gate.is_delay() && i.qubits[0] == q && i.start() <= iv.t_start + 1e-9 && iv.t_end <= i.end() + 1e-9
                })
                .ok_or_else(|| Error::InvalidCircuit(format!("qubit {q} is not idle over the interval")))?;
            let d = layer.instructions.remove(pos);
            let mut pieces = Vec::new();
            let push_delay = |a: f64, b: f64, pieces: &mut Vec<Instruction>| {
                if b - a > 1e-9 {
                    pieces.push(Instruction::timed(Gate::Delay(b - a), &[q], a, b - a));
                }
            };
            let mut t = d.start();
            for s in &seq.pulse_starts {
                let a = iv.t_start + s;
                push_delay(t, a, &mut pieces);
                pieces.push(Instruction::timed(Gate::X, &[q], a, pulse_ns));
                t = a + pulse_ns;
            }
            push_delay(t, d.end(), &mut pieces);
            pulses += seq.pulse_starts.len();
            layer.instructions.extend(pieces);
            sort_instructions(&mut layer.instructions);
        }
        report.inserted.push(DdInsertion {
            qubits: iv.qubits.clone(),
            t_start: iv.t_start,
            t_end: iv.t_end,
            colors: col.colors.clone(),
            pulses,
        });
    }
    Ok((out, report))
}

//! Context-aware dynamical decoupling: joint idle windows are colored on the
//! crosstalk graph and filled with Walsh sequences so that coupled idle
//! qubits, and idle qubits next to gate controls or targets, are staggered.

mod apply;
mod coloring;
mod delays;
mod walsh;

pub use apply::{apply_dd, DdInsertion, DdReport};
pub use coloring::{coloring_violations, color_graph, uniform_coloring, Coloring, CONTROL_COLOR, TARGET_COLOR};
pub use delays::{collect_joint_delays, default_d_min, DelayInterval};
pub use walsh::{normalized_pulse_times, sequence_dictionary, transitions, walsh_sequence, walsh_signs, SequenceEntry, WalshSequence};

use crate::circuit::ScheduledCircuit;
use crate::device::CrosstalkGraph;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DdOptions {
    pub pulse_ns: f64,
    pub d_min: f64,
    /// Color every idle qubit 1 instead of coloring the graph.
    pub aligned: bool,
}

impl Default for DdOptions {
    fn default() -> Self {
        DdOptions { pulse_ns: 0.0, d_min: default_d_min(0.0), aligned: false }
    }
}

/// Full pass: collect, color, insert.
pub fn context_aware_dd(circuit: &ScheduledCircuit, graph: &CrosstalkGraph, opts: &DdOptions) -> Result<(ScheduledCircuit, DdReport)> {
    let intervals = collect_joint_delays(circuit, graph, opts.d_min);
    let colorings = if opts.aligned {
        uniform_coloring(&intervals, 1)
    } else {
        color_graph(&intervals, graph, circuit)
    };
    apply_dd(circuit, &intervals, &colorings, opts.pulse_ns)
}

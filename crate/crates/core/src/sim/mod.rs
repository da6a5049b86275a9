//! Coherent crosstalk simulator and verification oracles.
//!
//! Noise only accrues inside timed (two-qubit) layers. For every such layer
//! the diagonal error is integrated in the toggling frame and applied after
//! the layer's ideal operations.

mod analysis;
mod layer_fidelity;
mod oracle;
mod ramsey;
mod state;
mod timeline;

pub use analysis::{
    depolarization_overhead_fit, fit_exponential, mitigation_overhead, overhead_ratio, DepolarizationFit,
    ExponentialFit,
};
pub use layer_fidelity::{
    layer_fidelity, partition_layer, LayerFidelity, LayerFidelityConfig, Partition, PartitionFidelity, PartitionKind,
};
pub use oracle::{noisy_unitary, unitary_oracle, DenseMatrix};
pub use state::{simulate, simulate_from, simulate_ideal, Branch, Mode, ShotCounts, SimResult, StateVector, MAX_QUBITS};
pub use ramsey::{ramsey_circuit, ramsey_fidelity, RamseyCase, RamseyConfig, Suppression};
pub use timeline::{build_timeline, layer_noise, LayerNoise, NoiseTimeline, Segment};

use crate::device::{build_interaction_graph, DeviceModel, StarkTerm};
use crate::error::{Error, Result};

/// Which noise terms are active.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoiseFlags {
    pub zz: bool,
    pub stark: bool,
    pub parity: bool,
}

impl NoiseFlags {
    pub const ALL: NoiseFlags = NoiseFlags { zz: true, stark: true, parity: true };
    pub const COHERENT: NoiseFlags = NoiseFlags { zz: true, stark: true, parity: false };
    pub const NONE: NoiseFlags = NoiseFlags { zz: false, stark: false, parity: false };

    /// Parses a comma list such as `zz,stark,parity`; `none` or an empty string disables all.
    pub fn parse(s: &str) -> Result<Self> {
        let mut f = NoiseFlags::NONE;
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "zz" => f.zz = true,
                "stark" => f.stark = true,
                "parity" => f.parity = true,
                "all" => f = NoiseFlags::ALL,
                "none" => {}
                other => return Err(Error::Config(format!("unknown noise term `{other}`"))),
            }
        }
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    pub num_qubits: usize,
    /// `(a, b, zz_hz)` with `a < b`.
    pub edges: Vec<(usize, usize, f64)>,
    pub stark: Vec<StarkTerm>,
    /// `(qubit, delta_hz)`.
    pub parity: Vec<(usize, f64)>,
}

impl NoiseModel {
    pub fn from_device(device: &DeviceModel, flags: NoiseFlags) -> Self {
        let edges = if flags.zz {
            build_interaction_graph(device).edges.iter().map(|e| (e.a, e.b, e.zz_hz)).collect()
        } else {
            Vec::new()
        };
        let stark = if flags.stark {
            device.stark_terms.iter().filter(|s| s.shift_hz != 0.0).cloned().collect()
        } else {
            Vec::new()
        };
        let mut parity: Vec<(usize, f64)> = Vec::new();
        if flags.parity {
            for q in 0..device.num_qubits {
                let d = device.delta_hz(q);
                if d != 0.0 {
                    parity.push((q, d));
                }
            }
        }
        NoiseModel { num_qubits: device.num_qubits, edges, stark, parity }
    }

    pub fn coherent(device: &DeviceModel) -> Self {
        NoiseModel::from_device(device, NoiseFlags::COHERENT)
    }

    pub fn noiseless(num_qubits: usize) -> Self {
        NoiseModel { num_qubits, edges: Vec::new(), stark: Vec::new(), parity: Vec::new() }
    }

    pub fn is_noiseless(&self) -> bool {
        self.edges.iter().all(|e| e.2 == 0.0) && self.stark.is_empty() && self.parity.is_empty()
    }
}

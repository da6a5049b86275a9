//! Context-aware compilation passes for layered quantum circuits, together with
//! a coherent crosstalk simulator used to verify them.

pub mod benchmarks;
pub mod cadd;
pub mod caec;
pub mod circuit;
pub mod device;
pub mod error;
pub mod euler;
pub mod io;
pub mod math;
pub mod pauli;
pub mod pipeline;
pub mod schedule;
pub mod seed;
pub mod sim;
pub mod stratify;
pub mod twirl;

pub use circuit::{Circuit, Gate, Instruction, Layer, LayerKind, LayerRole, ScheduledCircuit};
pub use error::{Error, Result};
pub use pauli::{Pauli, PauliString};

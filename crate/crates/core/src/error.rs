use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("instructions overlap on qubit {qubit}: {detail}")]
    Overlap { qubit: usize, detail: String },
    #[error("device has no duration for `{0}`")]
    MissingDuration(String),
    #[error("pauli length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("`{0}` is not a supported two-qubit Clifford")]
    NotClifford(String),
    #[error("circuit is not stratified: {0}")]
    NotStratified(String),
    #[error("interval of {duration} ns cannot fit {pulses} pulses of {pulse_ns} ns")]
    TooShort {
        duration: f64,
        pulses: usize,
        pulse_ns: f64,
    },
    #[error("dynamic circuit has no measurement followed by a conditional gate")]
    MissingCondition,
    #[error("{num_qubits} qubits exceeds the simulator limit of {limit}")]
    TooManyQubits { num_qubits: usize, limit: usize },
    #[error("fit failed: {0}")]
    FitFailure(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid qubit {qubit} (circuit has {num_qubits})")]
    InvalidQubit { qubit: usize, num_qubits: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("invalid device: {0}")]
    InvalidDevice(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

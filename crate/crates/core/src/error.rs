use thiserror::Error;

/// Errors raised across synthesis, simulation, routing and costing.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("qubit index {index} out of range for a {num_qubits}-qubit circuit")]
    Index { index: usize, num_qubits: usize },

    #[error("{num_qubits} qubits exceeds the simulator cap of {cap}")]
    Capacity { num_qubits: usize, cap: usize },

    #[error("infeasible model: {0}")]
    Infeasible(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

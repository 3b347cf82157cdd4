use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A register or enumeration would exceed the configured qubit cap.
    #[error("{what} needs {requested} qubits but the cap is {max}")]
    Capacity {
        what: &'static str,
        requested: usize,
        max: usize,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("index error: {0}")]
    Index(String),
    #[error("invalid input: {0}")]
    Validation(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

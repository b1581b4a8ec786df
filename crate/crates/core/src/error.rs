use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A relation word is not supported strictly to the right of its generator(s).
    #[error("malformed relation {relation}: {reason}")]
    Malformed { relation: String, reason: String },

    #[error("inconsistent presentation: overlap {overlap} collects to {left:?} and {right:?}")]
    Inconsistent {
        overlap: String,
        left: Vec<u8>,
        right: Vec<u8>,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{what} needs {size} enumeration steps, above the gate of {gate}")]
    Infeasible {
        what: String,
        size: String,
        gate: u128,
    },

    #[error("hypotheses not met: {0}")]
    Hypothesis(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("no witness found although the hypotheses hold: {0}")]
    WitnessNotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;

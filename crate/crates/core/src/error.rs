use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph not connected")]
    NotConnected,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("cap exceeded: {what} ({requested} > {limit})")]
    CapExceeded {
        what: String,
        requested: u64,
        limit: u64,
    },

    #[error("edge sets differ: {0} vs {1} edges")]
    EdgeSetMismatch(usize, usize),

    #[error("graph is not a cactus: edge {0} lies on more than one cycle")]
    NotCactus(usize),

    #[error("state is not uniform within edge class {0}")]
    NonUniformState(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not a state: {0}")]
    NotAState(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid arguments: {0}")]
    InvalidArgs(String),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("simplex iteration limit reached after {0} pivots")]
    IterationLimit(u64),
}

pub type Result<T> = std::result::Result<T, Error>;

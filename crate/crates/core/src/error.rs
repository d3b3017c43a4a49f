use thiserror::Error;

use crate::cover::CoverError;

/// Errors produced by the graph, boxing, model and estimation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("graph is disconnected: vertex {0} cannot reach vertex {1}")]
    Disconnected(usize, usize),

    #[error("vertex budget exceeded: {needed} vertices requested, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("witness set rejected: vertices {u} and {v} are at distance {distance}, need at least {ell}")]
    WitnessRejected {
        u: usize,
        v: usize,
        distance: u32,
        ell: u32,
    },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Cover(#[from] CoverError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

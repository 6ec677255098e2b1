use thiserror::Error;

use crate::optimizer::GeneralSolution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("enumeration cap exceeded: {needed} items requested, cap is {cap}")]
    EnumerationCapExceeded { needed: u128, cap: u128 },

    #[error("link {0} is not covered by any activation set")]
    UncoveredLink(usize),

    #[error("age is unbounded: link {link} has zero activation frequency")]
    UnboundedAge { link: usize },

    #[error("solver stopped after {iterations} iterations with gap {gap:e}")]
    MaxIterExceeded {
        iterations: usize,
        gap: f64,
        best: Box<GeneralSolution>,
    },

    #[error("unstable queue: arrival rate {lambda} is not below service rate {mu}")]
    UnstableQueue { lambda: f64, mu: f64 },

    #[error("no bracketing interval found: {0}")]
    NoBracket(String),

    #[error("oracle budget exceeded: {0}")]
    OracleBudgetExceeded(String),

    #[error("scheduler refers to link {link} but the network has {n_links} links")]
    UnknownLink { link: usize, n_links: usize },

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

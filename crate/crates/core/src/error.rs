use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("infeasible plan: {0}")]
    InfeasiblePlan(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("hypothesis violated at node {node}: in-degree {indeg} < out-degree {outdeg}")]
    Hypothesis { node: usize, indeg: u64, outdeg: u64 },
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("cutting-plane loop made no progress: {0}")]
    NoProgress(String),
    #[error("cut limit of {0} exceeded")]
    CutLimit(usize),
    #[error("size guard exceeded: {0}")]
    Guard(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal solver fault: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

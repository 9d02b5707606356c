use alloc::string::String;

use crate::conic::SolveStatus;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("expansion point must have t > 0, got {0}")]
    NonPositiveExpansionPoint(f64),
    #[error("rank-one extraction failed: eigenvalue ratio {0:e}")]
    Rank1Extraction(f64),
    #[error("matrix trace is zero, nothing to extract")]
    AllZero,
    #[error("conic solver stopped with status {0:?}")]
    Solver(SolveStatus),
    #[error("problem is infeasible")]
    Infeasible,
    #[error("no feasible starting point")]
    InitializationInfeasible,
    #[error("solution carries no multiplier for {0}")]
    MissingDuals(String),
    #[error("dimension too large for exhaustive search: M={m}, N={n}")]
    DimensionTooLarge { m: usize, n: usize },
    #[error("malformed cone program: {0}")]
    MalformedProgram(String),
}

pub type Result<T> = core::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("input error: {0}")]
    Input(String),
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not height 2 at this horizon: {0}")]
    NotHeightTwo(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("exhaustive search budget exceeded ({needed} coefficients > {budget}); use --si-strategy montecarlo")]
    Budget { needed: usize, budget: usize },
    /// A theorem check produced a counterexample.
    #[error("check failed: {0}")]
    Check(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    /// Internal consistency trap.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Check(_) | Error::Internal(_) => 1,
            Error::Inconclusive(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no sign change for {what} on [{lo}, {hi}]")]
    Bracket { what: String, lo: f64, hi: f64 },

    #[error("{what} did not converge after {iterations} iterations (last bracket [{lo}, {hi}])")]
    NoConvergence {
        what: String,
        iterations: usize,
        lo: f64,
        hi: f64,
    },

    #[error("eigenvalues {0} and {1} are nearly degenerate near the requested shift")]
    NearlyDegenerate(f64, f64),

    #[error("singular matrix encountered at row {0}")]
    Singular(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

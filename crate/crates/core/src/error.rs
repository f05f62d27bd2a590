use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Reducible or periodic chain where an ergodic one is required.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("{what} needs {required} but the budget is {budget}{}", hint.map(|h| format!("; {h}")).unwrap_or_default())]
    BudgetExceeded {
        what: &'static str,
        required: String,
        budget: u64,
        hint: Option<&'static str>,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("series did not converge within {lags} lags (partial sum {partial})")]
    NoConvergence { partial: f64, lags: usize },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

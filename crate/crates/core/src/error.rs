use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of the function (z <= 0, t <= 0, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Structurally invalid parameters (policy, grid, kernel parameters).
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("{what} did not converge within a budget of {budget} (last estimate {estimate:e})")]
    NonConvergence {
        what: &'static str,
        budget: usize,
        estimate: f64,
    },
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// Field does not vanish where compact support is required.
    #[error("support violation: {0}")]
    Support(String),
    #[error("field is identically zero")]
    ZeroField,
    #[error("kernel evaluated on the diagonal")]
    OnDiagonal,
    #[error("certificate fit failed: {0}")]
    Fit(String),
    #[error("parameter regime violated: {0}")]
    Regime(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

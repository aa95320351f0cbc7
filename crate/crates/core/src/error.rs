use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degree {n} is not below 2N = {two_n}; the moment functional is degenerate there")]
    DegreeTooLarge { n: usize, two_n: usize },
    #[error("singular linear system at pivot {0}")]
    Singular(usize),
    #[error("recurrence denominator vanishes at index {0}")]
    VanishingDenominator(usize),
    #[error("norming constant kappa_{0} vanishes")]
    ZeroNorm(usize),
    #[error("{0} lies on a branch cut")]
    OnCut(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}

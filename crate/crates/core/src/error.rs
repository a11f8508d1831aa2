use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty interval: [{lo}, {hi}]")]
    EmptyInterval { lo: i64, hi: i64 },

    #[error("signal has a nonzero tail; exact total variation needs zero tails")]
    NonzeroTail,

    #[error("window [{lo}, {hi}] does not contain the support of the signal")]
    WindowMissesSupport { lo: i64, hi: i64 },

    #[error("extrema at the window boundary are ambiguous: {0}")]
    AmbiguousBoundary(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("function is identically zero")]
    ZeroFunction,

    #[error("unknown perturbation family {0:?}")]
    UnknownFamily(String),

    #[error("quadrature error estimate {estimate:e} exceeds tolerance {tol:e}")]
    QuadratureTolerance { estimate: f64, tol: f64 },

    #[error("beta must lie in [0.05, 0.95], got {0}")]
    BetaOutOfRange(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

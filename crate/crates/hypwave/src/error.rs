use thiserror::Error;

/// Errors shared across the solver, diagnostics and certification modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// NaN/Inf appeared during time stepping. Carries the last healthy time,
    /// which doubles as the blow-up indicator for the sphere target.
    #[error("numeric failure at t = {time}")]
    NumericFailure { time: f64 },

    #[error("state endpoint class does not match lambda = {expected} (got {got})")]
    ClassMismatch { expected: f64, got: f64 },

    #[error("concentration scale undefined: cone energy is zero")]
    UndefinedScale,

    #[error("certification failure: {0}")]
    CertificationFailure(String),

    #[error("config parse error at line {line}, column {col}: {msg}")]
    ConfigParse { line: usize, col: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Result outside the representable range. `scaled` carries a
    /// representable rescaled value where one exists.
    #[error("range error: {message}")]
    Range { message: String, scaled: Option<f64> },

    /// Invalid or contradictory configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical procedure did not reach its tolerance.
    #[error("numeric error: {message} (achieved tolerance {achieved:e})")]
    Numeric { message: String, achieved: f64 },

    /// A sampled grid does not cover the region carrying the signal.
    #[error("coverage error: {0}")]
    Coverage(String),

    /// A sampling grid is too coarse for the quantity being resolved.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// Stationary-phase evaluation hit a caustic.
    #[error("singular point: {0}")]
    Singular(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration {
        t: f64,
        reason: String,
        /// Last accepted state, flattened as (x, y.., lam, mu..).
        last_state: Vec<f64>,
    },

    #[error("shooting did not converge (best residual {residual:e})")]
    Convergence { residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("truncated tail too large (tail estimate {tail:e})")]
    Truncation { tail: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

use thiserror::Error;

/// Errors raised by path construction, seminorm evaluation, integration and
/// the experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("paths are not sampled on a common grid")]
    GridMismatch,

    #[error("controlled path is not controlled by the rough path's {0}")]
    ControllerMismatch(&'static str),

    #[error("empty restriction to [{a}, {b}]")]
    EmptyRestriction { a: f64, b: f64 },

    #[error("non-finite value at grid index {0}")]
    NonFinite(usize),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

/// Rejects exponents outside the open unit interval.
pub(crate) fn check_unit_exponent(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("{value} is not in (0, 1)")))
    }
}

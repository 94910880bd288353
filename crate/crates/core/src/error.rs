use thiserror::Error;

/// Errors raised by the library. Divergent integrals are not errors; they
/// surface as `f64::INFINITY` values instead.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed data: bad tiling, non-finite samples, unsorted nodes, ...
    #[error("invalid input: {0}")]
    Input(String),
    /// A mathematical hypothesis required by the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}

/// Exponents are restricted to (1, 64]; `(p/(p-1))^p` overflows as p -> 1.
pub fn check_exponent(p: f64) -> Result<()> {
    if !(p > 1.0) {
        return precondition("p must exceed 1");
    }
    if p > 64.0 || !p.is_finite() {
        return precondition("p must not exceed 64");
    }
    Ok(())
}

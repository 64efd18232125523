use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the Gamma function at z = {0}")]
    Pole(f64),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("no sign change of the saddle function on [{lo:e}, {hi:e}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("root finder did not converge after {iterations} iterations (last beta = {last:e})")]
    MaxIterations { iterations: usize, last: f64 },
    #[error("saddle-point approximation invalid: {0}")]
    SpaInvalid(String),
    #[error("empty input")]
    EmptyInput,
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

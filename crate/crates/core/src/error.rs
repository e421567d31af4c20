use thiserror::Error;

/// Errors produced by the integration engines, norm evaluators and harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("weight of degree {gamma} is not locally integrable in dimension {dim}")]
    NonIntegrableWeight { gamma: f64, dim: usize },
    #[error("divergent: {0}")]
    Divergent(String),
    #[error("tolerance not met: requested {requested:e}, achieved {achieved:e}")]
    ToleranceNotMet { requested: f64, achieved: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("integrand is not finite at t = {at}")]
    NonFinite { at: f64 },
    #[error("config error at line {line}, column {column}: {message}")]
    Config { line: usize, column: usize, message: String },
    #[error("expression error at offset {offset}: {message}")]
    Expression { offset: usize, message: String },
    #[error("lipschitz bound violated: |b(x)-b(z)| = {lhs:e} > {rhs:e}")]
    LipschitzViolation { lhs: f64, rhs: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn is_divergent(&self) -> bool {
        matches!(self, Error::Divergent(_))
    }
}

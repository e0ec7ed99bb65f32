use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants are grouped by what went wrong rather than by module, so the CLI
/// can map them onto exit codes without knowing where they came from.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum XxError {
    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("parity violation: {0}")]
    Parity(String),

    #[error("{what} = {value} out of range [{min}, {max}]")]
    Range {
        what: &'static str,
        value: i64,
        min: i64,
        max: i64,
    },

    #[error("invalid momentum configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("coincident momenta p = {p}, q = {q} hit a pole of the sine kernel")]
    Coincidence { p: f64, q: f64 },

    #[error("pole: {0}")]
    Pole(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit: {what} needs {requested}, limit is {limit}")]
    Resource {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    #[error("value with log-magnitude {0} does not fit in a plain complex number")]
    Overflow(f64),

    #[error("numerical assertion failed: {what} (residue {residue:e})")]
    NumericalAssertion { what: String, residue: f64 },

    #[error("quadrature did not converge: estimate {estimate}, error {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("method mismatch: {0}")]
    MethodMismatch(String),
}

impl XxError {
    /// True for failures of a numerical self-check (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            XxError::NumericalAssertion { .. } | XxError::Quadrature { .. } | XxError::Overflow(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, XxError>;

use thiserror::Error;

/// Failures surfaced by the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("singular matrix in {context}: zero pivot at column {column}")]
    Singular { context: &'static str, column: usize },
    #[error("near-singular matrix in {context}: condition estimate {cond:.3e}")]
    NearSingular { context: &'static str, cond: f64 },
    #[error("non-finite kernel value at node pair ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("duplicate exponent {0}")]
    DuplicateExponent(String),
    #[error("log-derivative undefined: {0}")]
    LogUndefined(String),
    #[error("symbol does not decay: {0}")]
    NonDecaying(String),
    #[error("evaluation at a pole: {0}")]
    Pole(String),
    #[error("resonant Sylvester equation at order {n}")]
    Resonant { n: usize },
    #[error("outside the convergence region: {0}")]
    Divergent(String),
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("integration failed: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

use thiserror::Error;

/// Errors raised across the library.
///
/// The variants mirror the failure classes the runner maps onto exit codes:
/// configuration problems, numerical assembly failures and solver
/// nonconvergence are kept apart so callers can branch on them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected length {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("conjugate is unbounded: density never reaches {target}")]
    UnboundedConjugate { target: f64 },

    #[error("Hölder quotient evaluated on the diagonal x = y = {0}")]
    Diagonal(f64),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("assembly failure: {0}")]
    Assembly(String),

    #[error("solver did not converge: {0}")]
    NonConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Shape { expected, got })
    }
}

pub(crate) fn check_finite(t: f64, what: &str) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must be finite, got {t}")))
    }
}

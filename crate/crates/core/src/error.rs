use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    /// Structural or schema validation failure, with a path into the
    /// offending field (`M1[0][1]`, `gamma`, ...).
    #[error("validation failed at `{path}`: {message}")]
    Validation { path: String, message: String },

    #[error("matrix singular to working precision (condition estimate {cond:.3e})")]
    Singular { cond: f64 },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// Lyapunov equation has no (stabilizing) solution.
    #[error("no solution: {0}")]
    NoSolution(String),

    /// The Riccati Hamiltonian has imaginary-axis eigenvalues or no
    /// stabilizing solution.
    #[error("Riccati infeasible: {0}")]
    RiccatiInfeasible(String),

    /// Certificate synthesis failed after exhausting the eps ladder, or the
    /// frequency-domain margin rules a certificate out.
    #[error("certificate infeasible: {0}")]
    CertificateInfeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("infeasible at upper bound: {0}")]
    InfeasibleAtUpperBound(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

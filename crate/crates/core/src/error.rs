use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {deviation:e} exceeds {tolerance:e}")]
    NonHermitianInput { deviation: f64, tolerance: f64 },

    #[error("eigensolver failed to converge for a {n}x{n} matrix")]
    ConvergenceFailure { n: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not positive definite: min eigenvalue {min_eig:e} <= {floor:e}")]
    NotPositiveDefinite { min_eig: f64, floor: f64 },

    #[error("matrix is not negative definite: max eigenvalue {max_eig:e} > -{floor:e}")]
    NotNegativeDefinite { max_eig: f64, floor: f64 },

    #[error("not a contraction: operator norm {op_norm} > 1")]
    NotAContraction { op_norm: f64 },

    #[error("not a density matrix: |Tr X - 1| = {deviation:e}")]
    NotADensityMatrix { deviation: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid ensemble spec: {0}")]
    InvalidSpec(String),

    #[error("L violates the sign constraint for q = {q}: {detail}")]
    SignConstraintViolated { q: f64, detail: String },

    #[error("optimizer did not converge: gradient norm {grad_norm:e} after {iterations} iterations")]
    DidNotConverge { grad_norm: f64, iterations: usize },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

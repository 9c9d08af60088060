use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("non-finite matrix entry at ({0}, {1})")]
    NonFinite(usize, usize),

    #[error("superoperator is not completely positive (min eigenvalue {0:e})")]
    NotCompletelyPositive(f64),

    #[error("decompositions describe different operations (residual {0:e})")]
    NotEquivalent(f64),

    #[error("operation is not trace-nonincreasing (max eigenvalue of sum A^dag A is {0})")]
    NotTraceNonincreasing(f64),

    #[error("operation is not trace-preserving (deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("invalid environment model: {0}")]
    InvalidModel(String),

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("probability {0:e} is below the normalization floor")]
    ZeroProbability(f64),

    #[error("code subspace has dimension zero")]
    DegenerateCode,

    #[error("invalid code subspace: {0}")]
    InvalidCode(String),

    #[error("restriction to the code subspace vanishes (mu^2 = {0:e})")]
    ZeroRestriction(f64),

    #[error("operation is not reversible on the code subspace (violation {0:e})")]
    NotReversible(f64),

    #[error("value {0} outside the allowed domain {1}")]
    Domain(f64, &'static str),

    #[error("qubit index {0} out of range 1..=9")]
    IndexOutOfRange(usize),

    #[error("{0:e} of the state norm lies outside the single-error subspaces")]
    ResidualOutsideSubspaces(f64),

    #[error("state is not inside the expected subspace (residual {0:e})")]
    NotInSubspace(f64),

    #[error("operator ordering precondition failed: {0}")]
    Precondition(String),

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

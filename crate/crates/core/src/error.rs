use thiserror::Error;

/// Errors raised by the solver toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid sparse structure: {0}")]
    InvalidStructure(String),

    #[error("singular matrix: zero pivot at column {column}")]
    SingularMatrix { column: usize },

    #[error("local block of subdomain {subdomain} is singular (zero pivot at local column {column})")]
    SingularSubdomain { subdomain: usize, column: usize },

    #[error("non-finite entry in input")]
    NonFinite,

    #[error("QR iteration failed to converge for eigenvalue {index} after {sweeps} sweeps")]
    EigenNoConvergence { index: usize, sweeps: usize },

    #[error("column {column} is numerically dependent on the previous columns")]
    RankDeficient { column: usize },

    #[error("difference matrix is singular (condition estimate {condition:.3e}); use the SVD-based acceleration instead")]
    SingularDifferences { condition: f64 },

    #[error("(I - P) is singular: the coarse operator has an eigenvalue equal to 1")]
    SingularCoarseCorrection,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dense assembly of a {size}x{size} operator exceeds the cap of {cap}; use the power-iteration estimate instead")]
    AssemblyCapExceeded { size: usize, cap: usize },

    #[error("Krylov breakdown at iteration {iteration}: search direction vanished")]
    Breakdown { iteration: usize, partial: Box<crate::krylov::SolveReport> },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

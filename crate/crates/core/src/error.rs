use thiserror::Error;

/// Errors produced by the matrix kernel, the subalgebra machinery and the
/// channel constructions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpcError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index ({row}, {col}) out of range for dimension {dim}")]
    IndexOutOfRange { row: usize, col: usize, dim: usize },

    #[error("dimension {dim} does not factor as {left} x {right}")]
    NotFactorable {
        dim: usize,
        left: usize,
        right: usize,
    },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("matrix data is malformed: {0}")]
    MalformedMatrix(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("algebra closure did not stabilize after {rounds} rounds (span dimension {dim})")]
    ClosureDidNotStabilize { rounds: usize, dim: usize },

    #[error("subalgebra '{0}' has no commutant basis")]
    MissingCommutant(String),

    #[error("{0} is not prime")]
    NotPrime(usize),

    #[error("prime {0} exceeds the supported maximum of 13")]
    PrimeTooLarge(usize),

    #[error("spectral projection {index} has rank {rank:.3}, expected 1")]
    DegenerateProjection { index: usize, rank: f64 },

    #[error("invalid block structure: {0}")]
    InvalidBlocks(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("lambda has {found} entries but the decomposition has {expected} parts")]
    LambdaLength { expected: usize, found: usize },

    #[error("system is not HS-orthonormal (violation {violation:e})")]
    NotOrthonormal { violation: f64 },

    #[error("matrix is not in subalgebra (projection residual {residual:e})")]
    NotInSubalgebra { residual: f64 },

    #[error("restriction to part {part} is not depolarizing (deviation {deviation:e})")]
    RestrictionMismatch { part: usize, deviation: f64 },

    #[error("unknown decomposition builder '{0}'")]
    UnknownBuilder(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown certification method '{0}'")]
    UnknownMethod(String),
}

pub type Result<T> = std::result::Result<T, GpcError>;

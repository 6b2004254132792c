use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: every factor needs dimension at least 2")]
    InvalidDimension(usize),

    #[error("matrix side {side} does not match {dim_a}x{dim_b}")]
    ShapeMismatch { side: usize, dim_a: usize, dim_b: usize },

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("basis index {index} out of range for a basis of {len} elements")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("coefficient indices must be strictly increasing and at least 1")]
    InvalidIndices,

    #[error("coefficient vectors are over different index sets")]
    IndexSetMismatch,

    #[error("Jacobi eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("Pauli index {0} outside 0..=3")]
    PauliIndex(usize),

    #[error("mixing weight {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("operator is zero")]
    ZeroOperator,

    #[error("operator is not an orthogonal projector (residual {0:.3e})")]
    NotProjector(f64),

    #[error("invalid product basis: {0}")]
    InvalidProductBasis(String),

    #[error("claimed unextendible product basis is extendible (product overlap {0:.9})")]
    ExtendibleBasis(f64),

    #[error("invalid target point: {0}")]
    InvalidTarget(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown demo `{0}`")]
    UnknownDemo(String),
}

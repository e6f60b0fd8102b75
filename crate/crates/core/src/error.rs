//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("modulus {0} is not supported (moduli must be at least 1)")]
    InvalidModulus(u32),

    #[error("group order overflows the index range")]
    GroupTooLarge,

    #[error("every residue is a square modulo {0}")]
    NoNonsquare(u32),

    #[error("{n} is not a nonsquare modulo {p}")]
    NotNonsquare { n: u32, p: u32 },

    #[error("search budget exceeded after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },

    #[error("matrix is singular (rank {rank} < {dim})")]
    SingularMatrix { rank: usize, dim: usize },

    #[error("Fourier transform at the zero frequency is not an equidistribution question")]
    ZeroFrequency,

    #[error("ambient groups differ: {left:?} vs {right:?}")]
    AmbientMismatch { left: Vec<u32>, right: Vec<u32> },

    #[error("operation requires a homogeneous prime ambient Z_p^d, got moduli {0:?}")]
    NonHomogeneous(Vec<u32>),

    #[error("|E||A| = {product} but the group has order {order}")]
    SizeProductMismatch { product: usize, order: usize },

    #[error("sets have different sizes ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("the Fourier transform of the set vanishes at no nonzero frequency")]
    NoFourierZero,

    #[error("hyperplane class {class} holds {found} points, expected {expected}")]
    NotEquidistributed { class: u32, found: usize, expected: usize },

    #[error("length {len} is not a multiple of p = {p}")]
    DimensionNotMultipleOfP { len: usize, p: u32 },

    #[error("vector {0} is not balanced")]
    NotBalanced(&'static str),

    #[error("matrix is not a Davey matrix: {0}")]
    NotDecomposable(String),

    #[error("prime {0} is not supported by this operation")]
    UnsupportedPrime(u32),

    #[error("p = {0} is not congruent to 3 mod 4")]
    WrongResidueClass(u32),

    #[error("expected dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate {coordinate} of point {point} is {value}, outside [0, {modulus})")]
    CoordinateOutOfRange {
        point: usize,
        coordinate: usize,
        value: u64,
        modulus: u32,
    },

    #[error("point {index} duplicates an earlier point")]
    DuplicatePoint { index: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not log-Hadamard: {0}")]
    NotLogHadamard(String),

    #[error("internal consistency check failed: {0}")]
    InternalInconsistency(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

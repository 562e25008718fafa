use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("width {0} outside supported range 1..={1}")]
    WidthOutOfRange(usize, usize),

    #[error("value {value} does not fit in {width} bits")]
    ValueOutOfRange { value: u64, width: usize },

    #[error("truth table length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("generator is not a bijection on the domain: {0}")]
    NotBijection(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("class with {orbits} orbits is too large to enumerate (limit {limit})")]
    ClassTooLarge { orbits: usize, limit: usize },

    #[error("support size {0} is not an integer")]
    NonIntegerSupport(f64),

    #[error("{m} supports of measure {zeta} exceed the domain")]
    SupportsOverlap { m: usize, zeta: f64 },

    #[error("dimension {dim} exceeds cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator norm {0} exceeds 1")]
    NormViolation(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("density operator invalid: {0}")]
    InvalidDensity(String),

    #[error("expectation has imaginary residue {0:e}")]
    ImaginaryResidue(f64),

    #[error("query function value {value} at x={x}, y={y} is outside [-1, 1]")]
    QueryOutOfRange { x: usize, y: u8, value: f64 },

    #[error("target does not support classical statistical queries")]
    NoClassicalAccess,

    #[error("tolerance {0} must lie in (0, 1]")]
    InvalidTolerance(f64),

    #[error("tolerance {tau} too large: {reason}")]
    ToleranceTooLarge { tau: f64, reason: String },

    #[error("tolerance {tau} too small: {reason}")]
    ToleranceTooSmall { tau: f64, reason: String },

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("state has weight {0:e} outside the support of the reference operator")]
    SupportLeakage(f64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

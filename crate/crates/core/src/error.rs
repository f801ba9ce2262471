use thiserror::Error;

/// Errors raised by the symbolic and numeric pipelines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected L = {expected}, got L = {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch in {what}: expected {expected}, got {found}")]
    ShapeMismatch {
        what: String,
        expected: String,
        found: String,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("symbolic determinant of size {size} exceeds the configured limit {limit}")]
    SizeLimit { size: usize, limit: usize },

    #[error("evaluation point is off the unit circle: |z_{index}| = {modulus}")]
    OffCircle { index: usize, modulus: f64 },

    #[error("polynomial is not Hermitian: coefficient at {degree:?} is not the conjugate of its mirror")]
    NotHermitian { degree: Vec<i32> },

    #[error("division by the zero polynomial")]
    ZeroDivisor,

    #[error("polynomial is not exactly divisible by the given divisor")]
    NotDivisible,

    #[error("degree {degree:?} lies outside the basis box {nhat:?}")]
    DegreeOutOfRange { degree: Vec<i32>, nhat: Vec<u32> },

    #[error("Gram degree ledger produced a negative degree {degree:?} for multiplier {multiplier}; raise the slack")]
    InfeasibleDegreeLedger { multiplier: usize, degree: Vec<i64> },

    #[error("Routh table is degenerate: leading entry of row {row} vanishes identically")]
    DegenerateRouthTable { row: usize },

    #[error("well-posedness violated: Delta(z) - A_SS is singular at z = {at}")]
    IllPosed { at: String },

    #[error("unsupported model: {0}")]
    Unsupported(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("matrix is not Hermitian within tolerance")]
    NonHermitianMatrix,

    #[error("simulation diverged at t = {time} s")]
    Divergence { time: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

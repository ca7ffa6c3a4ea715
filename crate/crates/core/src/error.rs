use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum SpdoError {
    #[error("sphere dimension n={0} is not supported (need n >= 3)")]
    UnsupportedDimension(usize),

    #[error("operation requires n=3, got n={0}")]
    RequiresN3(usize),

    #[error("abscissa t={0} lies outside [-1, 1]")]
    AbscissaOutOfRange(f64),

    #[error("vector is not unit length (|x| = {0})")]
    NotUnitVector(f64),

    #[error("quadrature rule needs at least one node")]
    EmptyQuadrature,

    #[error("Fourier-Legendre coefficient at degree {degree} is {value:e}; expected a positive value")]
    NonPositiveCoefficient { degree: usize, value: f64 },

    #[error("degree {requested} exceeds the tabulated range 0..={available}")]
    DegreeOutOfTable { requested: usize, available: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("symbol `{name}` is not strongly elliptic: min ratio {min_ratio:e} <= 0")]
    NotStronglyElliptic { name: String, min_ratio: f64 },

    #[error("symbol `{0}` appears to vanish for infinitely many degrees")]
    InfiniteKernel(String),

    #[error("unknown operator `{0}`")]
    UnknownOperator(String),

    #[error("unknown kernel `{0}`")]
    UnknownKernel(String),

    #[error("cannot parse symbol expression: {0}")]
    Expression(String),

    #[error("point file line {line}: {message}")]
    PointFile { line: usize, message: String },

    #[error("duplicate points at lines {first} and {second}")]
    DuplicatePoints { first: usize, second: usize },

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("series truncated at l_max={l_max} has tail bound {bound:e} above tolerance {tolerance:e}")]
    TruncationTolerance { l_max: usize, bound: f64, tolerance: f64 },

    #[error("series is not absolutely convergent (term exponent {exponent} >= -1)")]
    DivergentSeries { exponent: f64 },

    #[error("Cholesky breakdown at row {row}: pivot {pivot:e} (smallest pivot so far {smallest:e})")]
    NotPositiveDefinite { row: usize, pivot: f64, smallest: f64 },

    #[error("constraint functionals are not unisolvent on ker L (reciprocal condition {rcond:e})")]
    NotUnisolvent { rcond: f64 },

    #[error("mesh norms must be strictly decreasing and errors positive (row {0})")]
    NonMonotoneLadder(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SpdoError>;

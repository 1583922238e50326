//! Error type shared by every module of the engine.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("coefficient {coefficient} of {prime} is not of the form (m-1)/m")]
    NotStandardCoefficient { prime: String, coefficient: String },
    #[error("infinite coefficient on {0} cannot be stored in a Q-divisor")]
    InfiniteCoefficient(String),
    #[error("invalid multiplicity {0}; boundary multiplicities are integers >= 2 or inf")]
    InvalidMultiplicity(String),
    #[error("undefined operation with inf: {0}")]
    UndefinedInfinity(String),
    #[error("unknown prime {0}")]
    UnknownPrime(String),
    #[error("chart mismatch: expected {expected}, found {found}")]
    ChartMismatch { expected: String, found: String },
    #[error("axis {axis} out of range for a chart of dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("exponent matrix has zero determinant")]
    SingularExponents,
    #[error("invalid exponent matrix: {0}")]
    InvalidExponents(String),
    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),
    #[error("degrees n={n}, p={p} out of range for dimension {dim}")]
    DegreeOutOfRange { n: usize, p: usize, dim: usize },
    #[error("closed-form allowances need a diagonal cover")]
    NonDiagonal,
    #[error("boundary component {0} is not a coordinate hyperplane of the chart")]
    NotCoordinateBoundary(String),
    #[error("factorization mismatch: {0}")]
    FactorizationMismatch(String),
    #[error("inconsistent orbit over {prime}: preimages give multiplicities {values}")]
    InconsistentOrbit { prime: String, values: String },
    #[error("cover is not adapted: {0}")]
    NotAdapted(String),
    #[error("non-integral genus: 2g-2 = {0}")]
    NonIntegralGenus(String),
    #[error("invalid ramification profile: {0}")]
    InvalidProfile(String),
    #[error("missing canonical data: {0}")]
    MissingCanonical(String),
    #[error("{count} basis tensors exceed the enumeration cap of {cap}")]
    TooManyTensors { count: u128, cap: usize },
    #[error("truncation overflow: {0}")]
    TruncationOverflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

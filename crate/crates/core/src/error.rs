use thiserror::Error;

pub type Result<T, E = JnrError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JnrError {
    #[error("operator is not Hermitian: max |H - H^dagger| = {max_deviation:e} exceeds tolerance {tolerance:e}")]
    NonHermitianInput { max_deviation: f64, tolerance: f64 },

    #[error("eigensolver did not converge for a {dim}x{dim} matrix")]
    NoConvergence { dim: usize },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("basis columns are not orthonormal (max deviation {deviation:e})")]
    NonOrthonormalBasis { deviation: f64 },

    #[error("not a density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("direction strategy {strategy} cannot produce {k}-dimensional directions")]
    StrategyDimensionMismatch { strategy: &'static str, k: usize },

    #[error("halfspace intersection is unbounded: directions do not positively span R^{k}")]
    UnboundedIntersection { k: usize },

    #[error("interior point violates a halfspace (margin {margin:e})")]
    InteriorPointInvalid { margin: f64 },

    #[error("operation requires dimension {expected}, got {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("eigenspace image has rank {rank}; not a flat boundary part")]
    NotAFlatPart { rank: usize },

    #[error("matrix is not unitary (max |U^dagger U - I| = {deviation:e})")]
    NonUnitaryInput { deviation: f64 },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("query {query} lies outside the known parameter range [{min}, {max}]")]
    QueryOutsideBracket { query: f64, min: f64, max: f64 },

    #[error("moment pair {index} is not attainable: <F^2> = {second_moment} < <F>^2 = {mean_squared}")]
    InvalidMomentPair {
        index: usize,
        second_moment: f64,
        mean_squared: f64,
    },

    #[error("dense representation limited to {max} sites, got {sites}")]
    TooManySites { sites: usize, max: usize },

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl JnrError {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            JnrError::NonHermitianInput { .. } => "NonHermitianInput",
            JnrError::NoConvergence { .. } => "NoConvergence",
            JnrError::DimensionMismatch { .. } => "DimensionMismatch",
            JnrError::NonOrthonormalBasis { .. } => "NonOrthonormalBasis",
            JnrError::InvalidDensityMatrix(_) => "InvalidDensityMatrix",
            JnrError::StrategyDimensionMismatch { .. } => "StrategyDimensionMismatch",
            JnrError::UnboundedIntersection { .. } => "UnboundedIntersection",
            JnrError::InteriorPointInvalid { .. } => "InteriorPointInvalid",
            JnrError::WrongDimension { .. } => "WrongDimension",
            JnrError::NotAFlatPart { .. } => "NotAFlatPart",
            JnrError::NonUnitaryInput { .. } => "NonUnitaryInput",
            JnrError::IndexOutOfRange { .. } => "IndexOutOfRange",
            JnrError::QueryOutsideBracket { .. } => "QueryOutsideBracket",
            JnrError::InvalidMomentPair { .. } => "InvalidMomentPair",
            JnrError::TooManySites { .. } => "TooManySites",
            JnrError::Parse { .. } => "ParseError",
            JnrError::InvalidArgument(_) => "InvalidArgument",
            JnrError::Io(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for JnrError {
    fn from(e: std::io::Error) -> Self {
        JnrError::Io(e.to_string())
    }
}

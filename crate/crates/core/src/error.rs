use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("problem dimension must be at least 1")]
    EmptyDimension,
    #[error("variance d[{index}] = {value} is not positive")]
    NonPositiveVariance { index: usize, value: f64 },
    #[error("prior variance gamma[{index}] = {value} is negative or not finite")]
    InvalidPriorVariance { index: usize, value: f64 },
    #[error("direction entry a[{index}] = {value} is negative or not finite")]
    NegativeDirection { index: usize, value: f64 },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{which} is not a square matrix")]
    NotSquare { which: &'static str },
    #[error("{which} is not symmetric")]
    NotSymmetric { which: &'static str },
    #[error("{which} is not positive definite")]
    NotPositiveDefinite { which: &'static str },
    #[error("dimension {p} is below the required minimum {min}")]
    DimensionTooSmall { p: usize, min: usize },
    #[error("minimaxity constant c* = {0} is negative")]
    NegativeCStar(f64),
    #[error("A Sigma is not nonnegative definite")]
    ConditionAViolated,
    #[error("A Sigma = Sigma A^T and Q A = A^T Q do not both hold")]
    ConditionA2Violated,
    #[error("alpha = {alpha} is below the floor {floor}")]
    AlphaBelowFloor { alpha: f64, floor: f64 },
    #[error("inputs must be sorted by nonincreasing Bayes importance")]
    NotSorted,
    #[error("unknown variance configuration `{0}`")]
    UnknownConfig(String),
    #[error("unknown estimator `{0}`")]
    UnknownEstimator(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("the requested operation needs a canonical (diagonal) problem")]
    NotCanonical,
}

impl Error {
    pub(crate) fn param(name: &str, reason: &str) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// True for errors that come from violated mathematical preconditions
    /// (as opposed to malformed input).
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::DimensionTooSmall { .. }
                | Error::NegativeCStar(_)
                | Error::ConditionAViolated
                | Error::ConditionA2Violated
                | Error::AlphaBelowFloor { .. }
        )
    }
}

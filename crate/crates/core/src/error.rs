use alloc::string::String;

/// Failures reported by the curvature library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("metric is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    MetricNotPositive { min_eigenvalue: f64 },

    #[error("metric is not Hermitian (max asymmetry {violation:e})")]
    MetricNotHermitian { violation: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{what}: expected length {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{what} out of range: {value} not in {lo}..={hi}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        lo: usize,
        hi: usize,
    },

    #[error("zero vector where a nonzero direction is required")]
    ZeroVector,

    #[error("vector does not lie in the subspace (relative residual {residual:e})")]
    NotInSubspace { residual: f64 },

    #[error("frame columns are not orthonormal (deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("tensor entries must be finite")]
    NonFinite,

    #[error("tensor violates Hermitian symmetry (max violation {violation:e})")]
    NotHermitian { violation: f64 },

    #[error("operation requires a Chern-Kähler-like tensor")]
    NotCkl,

    #[error("not uniformly RC {k}-positive: certified value {value}")]
    NotUniformlyPositive { k: usize, value: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("tensor power has {size} components, above the limit of {limit}")]
    TooLarge { size: usize, limit: usize },
}

impl Error {
    /// True for failures caused by a curvature hypothesis not holding, as
    /// opposed to malformed input.
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(
            self,
            Error::NotUniformlyPositive { .. } | Error::HypothesisViolated(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;

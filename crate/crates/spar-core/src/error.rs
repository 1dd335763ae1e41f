use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum SparError {
    #[error("response has zero sample variance")]
    ZeroVarianceResponse,

    /// The n-by-n ridge system failed to solve. With a positive penalty this
    /// only happens for non-finite inputs.
    #[error("ridge system could not be solved; inputs are likely non-finite")]
    SingularSystem,

    /// A Gram matrix solve failed with jitter 0; callers may retry with a
    /// positive jitter.
    #[error("Gram matrix is numerically singular; retry with a positive jitter")]
    SingularGram,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("diagonal value vector is identically zero")]
    AllZeroValues,

    #[error("tau {given} is not the smallest nonzero |beta| = {actual}")]
    InconsistentTau { given: f64, actual: f64 },

    #[error("covariance parameters do not define a positive definite matrix")]
    NonPositiveDefinite,

    #[error("{folds}-fold cross-validation needs at least {min} rows, got {n}")]
    FoldTooSmall { n: usize, folds: usize, min: usize },

    #[error("reduced fit with goal dimension {m} needs more than {n} rows")]
    DegenerateReducedFit { m: usize, n: usize },

    #[error("prediction-error denominator is not positive")]
    DegenerateDenominator,

    #[error("need at least {required} observations, got {n}")]
    TooFewObservations { n: usize, required: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unsupported model document version {0}")]
    UnsupportedModelVersion(u32),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SparError>;

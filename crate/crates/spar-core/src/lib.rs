//! Sparse Projected Averaged Regression (SPAR) for high-dimensional linear
//! models (p >> n): HOLP-based variable screening, data-informed CW random
//! projections, an ensemble of projected least-squares models with
//! threshold-driven sparsity and cross-validation, plus synthetic data
//! generators and evaluation metrics for benchmarking.
//!
//! ```
//! use spar_core::simgen::example_one;
//! use spar_core::{cross_validate, generate, predict, rmspe, SparConfig};
//!
//! // Compound-symmetry testbed: 10 active out of 200 predictors, 60 rows.
//! let (setting, coef) = example_one(200, 10);
//! let (train, test) = generate(&setting, &coef, 60, 50, 10.0, 1.0, 7)?;
//!
//! let config = SparConfig { max_models: 10, folds: 5, seed: 1, ..SparConfig::default() };
//! let model = cross_validate(&train, &config)?;
//! let y_hat = predict(&model, &test.x)?;
//!
//! let y_bar = train.y.sum() / train.n() as f64;
//! assert!(rmspe(&y_hat, &test.y, y_bar)? < 1.0);
//! # Ok::<(), spar_core::SparError>(())
//! ```

pub mod dataset;
pub mod error;
pub mod estimator;
pub mod metrics;
pub mod numeric;
pub mod projection;
pub mod screening;
pub mod seed;
pub mod simgen;

pub use dataset::{standardize, Dataset, Standardization, Truth};
pub use error::{Result, SparError};
pub use estimator::{
    cross_validate, predict, threshold, ModelDocument, SelectionRule, SparConfig, SparModel,
};
pub use metrics::{rmspe, selection_scores, EvalResult};
pub use numeric::{holp, ols_reduced, ridge_dual};
pub use projection::{
    gaussian_projection, project_coefficient, sparse_projection, theorem1_bound, CwProjection,
    DenseProjection, DiagonalPolicy,
};
pub use screening::{
    holp_scores, marginal_correlation_scores, probabilistic_screen, screening_report, top_k,
    ScreeningReport, ScreeningScores,
};
pub use seed::{derive_seed, rng_from_seed, SparRng};
pub use simgen::{
    generate, sample_coefficients, CoefficientRegime, CoefficientSpec, CovKind, Covariance,
    CovarianceSpec,
};

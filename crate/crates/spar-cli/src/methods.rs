//! Fitting and evaluating the benchmark methods on one dataset.

use ndarray::Array1;
use spar_core::estimator::{holp_weights, to_original_scale};
use spar_core::projection::DiagonalPolicy;
use spar_core::screening::{marginal_correlation_scores, top_k, ScoreSource, ScreeningScores};
use spar_core::{
    cross_validate, holp, ols_reduced, standardize, CwProjection, Dataset, Result, SparError,
    SparModel,
};

use crate::config::{CwDiagonalSpec, MethodSpec};

/// Original-scale fit of one method.
#[derive(Debug, Clone)]
pub struct FitOutput {
    pub coefficients: Array1<f64>,
    pub intercept: f64,
    pub chosen_m: Option<usize>,
    pub chosen_lambda: Option<f64>,
}

impl FitOutput {
    pub fn predict(&self, x: &ndarray::Array2<f64>) -> Array1<f64> {
        x.dot(&self.coefficients) + self.intercept
    }
}

/// The shared state a SPAR method entry needs: one cross-validated fit can
/// serve both selection rules.
pub fn fit_spar(spec: &MethodSpec, train: &Dataset, seed: u64) -> Result<SparModel> {
    let cfg = spec
        .spar_config(seed)
        .expect("fit_spar called on a non-SPAR method");
    cross_validate(train, &cfg)
}

pub fn spar_output(spec: &MethodSpec, model: &SparModel) -> FitOutput {
    let MethodSpec::Spar { rule, .. } = spec else {
        panic!("spar_output called on a non-SPAR method");
    };
    let (coefficients, intercept, m, lambda) = model.under_rule((*rule).into());
    FitOutput {
        coefficients,
        intercept,
        chosen_m: Some(m),
        chosen_lambda: Some(lambda),
    }
}

/// Fit any non-SPAR method.
pub fn fit_simple(spec: &MethodSpec, train: &Dataset, seed: u64) -> Result<FitOutput> {
    match spec {
        MethodSpec::Holp => fit_holp(train),
        MethodSpec::HolpScreenOnly { c } => fit_screen_only(train, ScreenScore::Holp, *c),
        MethodSpec::SisScreenOnly => fit_sis_screen_only(train),
        MethodSpec::CwProjectionVariant { diagonal, m } => {
            fit_cw_variant(train, *diagonal, *m, seed)
        }
        MethodSpec::Spar { .. } => unreachable!("SPAR entries go through fit_spar"),
    }
}

fn fit_holp(train: &Dataset) -> Result<FitOutput> {
    let (std_data, info) = standardize(train)?;
    let beta_std = holp_weights(&std_data)?;
    let (coefficients, intercept) = to_original_scale(&info, &beta_std);
    Ok(FitOutput {
        coefficients,
        intercept,
        chosen_m: None,
        chosen_lambda: None,
    })
}

enum ScreenScore {
    Holp,
}

/// Screen to ceil(c n) variables by deterministic top-k importance, then
/// regress on the kept columns: HOLP when more columns than rows remain,
/// otherwise plain least squares, each with a small ridge fallback (0.01)
/// near degeneracy.
fn fit_screen_only(train: &Dataset, score: ScreenScore, c: f64) -> Result<FitOutput> {
    if c <= 0.0 || c.is_nan() {
        return Err(SparError::InvalidConfig(
            "screen factor c must be positive".into(),
        ));
    }
    let (std_data, info) = standardize(train)?;
    let scores = match score {
        ScreenScore::Holp => ScreeningScores {
            scores: holp_weights(&std_data)?.mapv(f64::abs),
            source: ScoreSource::Holp,
        },
    };
    let k = ((c * train.n() as f64).ceil() as usize).clamp(1, train.p());
    screened_least_squares(&std_data, &info, &scores, k)
}

/// Marginal-correlation screening followed by least squares: the screening
/// primitive of SIS with the ceil(n / log n) subset size, which keeps the
/// OLS refit away from interpolation.
fn fit_sis_screen_only(train: &Dataset) -> Result<FitOutput> {
    let (std_data, info) = standardize(train)?;
    let scores = marginal_correlation_scores(&std_data)?;
    let n = train.n() as f64;
    let k = ((n / n.ln()).ceil() as usize).clamp(1, train.p().min(train.n() - 1));
    screened_least_squares(&std_data, &info, &scores, k)
}

fn screened_least_squares(
    std_data: &Dataset,
    info: &spar_core::Standardization,
    scores: &ScreeningScores,
    k: usize,
) -> Result<FitOutput> {
    let selected = top_k(scores, k);
    let x_sub = std_data.x.select(ndarray::Axis(1), &selected);
    let gamma = if k >= std_data.n() {
        match holp(&x_sub, &std_data.y, 0.0) {
            Ok(g) => g,
            Err(SparError::SingularGram) => holp(&x_sub, &std_data.y, 0.01)?,
            Err(e) => return Err(e),
        }
    } else {
        match ols_reduced(&x_sub, &std_data.y, 0.0) {
            Ok(g) => g,
            Err(SparError::SingularGram) => ols_reduced(&x_sub, &std_data.y, 0.01)?,
            Err(e) => return Err(e),
        }
    };
    let mut beta_std = Array1::zeros(std_data.p());
    for (slot, &j) in selected.iter().enumerate() {
        beta_std[j] = gamma[slot];
    }
    let (coefficients, intercept) = to_original_scale(info, &beta_std);
    Ok(FitOutput {
        coefficients,
        intercept,
        chosen_m: None,
        chosen_lambda: None,
    })
}

/// One CW projection of all p columns to goal dimension m under the chosen
/// diagonal policy, followed by reduced least squares.
fn fit_cw_variant(
    train: &Dataset,
    diagonal: CwDiagonalSpec,
    m: usize,
    seed: u64,
) -> Result<FitOutput> {
    if m < 1 || m >= train.n() {
        return Err(SparError::InvalidConfig(format!(
            "cw goal dimension m = {m} must satisfy 1 <= m < n"
        )));
    }
    let (std_data, info) = standardize(train)?;
    let p = std_data.p();
    let mut rng = spar_core::rng_from_seed(seed);

    let policy = match diagonal {
        CwDiagonalSpec::RandomSign => DiagonalPolicy::RandomSign,
        CwDiagonalSpec::HolpValues | CwDiagonalSpec::HolpSigns => {
            let w = holp_weights(&std_data)?;
            let values = match diagonal {
                CwDiagonalSpec::HolpValues => w.to_vec(),
                _ => w.iter().map(|v| v.signum()).collect(),
            };
            DiagonalPolicy::Values(values)
        }
        CwDiagonalSpec::OracleBeta | CwDiagonalSpec::OracleSigns => {
            let truth = train.truth.as_ref().ok_or_else(|| {
                SparError::InvalidConfig(
                    "oracle diagonal policies need ground-truth coefficients".into(),
                )
            })?;
            // True coefficients expressed for standardized columns.
            let values: Vec<f64> = (0..p)
                .map(|j| {
                    let v = truth.beta[j] * info.x_scale[j];
                    match diagonal {
                        CwDiagonalSpec::OracleBeta => v,
                        _ => v.signum(),
                    }
                })
                .collect();
            DiagonalPolicy::Values(values)
        }
    };

    let proj = CwProjection::draw(m.min(p), p, &policy, &mut rng)?;
    let z = proj.apply(&std_data.x)?;
    let gamma = match ols_reduced(&z, &std_data.y, 0.0) {
        Ok(g) => g,
        Err(SparError::SingularGram) => ols_reduced(&z, &std_data.y, 0.01)?,
        Err(e) => return Err(e),
    };
    let beta_std = {
        let expanded = proj.expand(&gamma);
        Array1::from_shape_fn(p, |j| expanded[j])
    };
    let (coefficients, intercept) = to_original_scale(&info, &beta_std);
    Ok(FitOutput {
        coefficients,
        intercept,
        chosen_m: None,
        chosen_lambda: None,
    })
}

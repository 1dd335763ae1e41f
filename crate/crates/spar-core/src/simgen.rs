//! Synthetic data generation: six covariance structures, coefficient
//! regimes from sparse to dense, and noise calibrated to a target
//! signal-to-noise ratio.
//!
//! Sampling never materializes a dense covariance for large p; every
//! structure has an exact latent or banded factor. The dense matrix is
//! available at desk scale as an oracle for tests.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::{Dataset, Truth};
use crate::error::{Result, SparError};
use crate::seed::rng_from_seed;

/// Covariance structure of the predictors.
#[derive(Debug, Clone, PartialEq)]
pub enum CovKind {
    Independent,
    CompoundSymmetry {
        rho: f64,
    },
    Autoregressive {
        rho: f64,
    },
    /// Block diagonal with `block_size` predictors per block: first half of
    /// the blocks compound symmetry (0.5), second half autoregressive (0.9),
    /// the very last block identity. When p is not a multiple of the block
    /// size, the last (identity) block absorbs the remainder.
    GroupBlock {
        block_size: usize,
    },
    /// `Sigma = F F' + 0.01 I` for a realized p-by-k standard normal factor
    /// matrix F.
    Factor {
        k: usize,
    },
    /// Latent construction where the `a` active columns are mutually
    /// independent, while every inactive column loads on the sum of the
    /// active latents, drowning the actives' marginal correlations.
    ExtremeCorrelation {
        a: usize,
    },
}

/// Declarative covariance description.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSpec {
    pub kind: CovKind,
    pub p: usize,
}

const GROUP_BLOCK_CS_RHO: f64 = 0.5;
const GROUP_BLOCK_AR_RHO: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq)]
enum BlockKind {
    Identity,
    Cs(f64),
    Ar(f64),
}

impl CovarianceSpec {
    pub fn new(kind: CovKind, p: usize) -> Self {
        CovarianceSpec { kind, p }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.p as f64;
        match &self.kind {
            CovKind::Independent => Ok(()),
            CovKind::CompoundSymmetry { rho } => {
                // Eigenvalues are 1 - rho + p rho and 1 - rho; both must be
                // positive.
                if *rho < 1.0 && *rho > -1.0 && 1.0 - rho + p * rho > 0.0 {
                    Ok(())
                } else {
                    Err(SparError::NonPositiveDefinite)
                }
            }
            CovKind::Autoregressive { rho } => {
                if rho.abs() < 1.0 {
                    Ok(())
                } else {
                    Err(SparError::NonPositiveDefinite)
                }
            }
            CovKind::GroupBlock { block_size } => {
                if *block_size == 0 {
                    Err(SparError::InvalidConfig(
                        "block size must be positive".into(),
                    ))
                } else {
                    Ok(())
                }
            }
            CovKind::Factor { k } => {
                if *k >= 1 {
                    Ok(())
                } else {
                    Err(SparError::InvalidConfig(
                        "factor count must be positive".into(),
                    ))
                }
            }
            CovKind::ExtremeCorrelation { a } => {
                if *a >= 1 && *a <= self.p {
                    Ok(())
                } else {
                    Err(SparError::InvalidConfig(format!(
                        "extreme-correlation active count {a} must lie in 1..=p"
                    )))
                }
            }
        }
    }

    /// True when the block structure does not tile p exactly and the last
    /// block absorbed the remainder.
    pub fn has_partial_block(&self) -> bool {
        match self.kind {
            CovKind::GroupBlock { block_size } => {
                self.p > block_size && !self.p.is_multiple_of(block_size)
            }
            _ => false,
        }
    }

    fn blocks(&self) -> Vec<(usize, usize, BlockKind)> {
        let CovKind::GroupBlock { block_size } = self.kind else {
            panic!("blocks() only applies to the group structure");
        };
        let nb = (self.p / block_size).max(1);
        (0..nb)
            .map(|b| {
                let start = b * block_size;
                let end = if b + 1 == nb {
                    self.p
                } else {
                    (b + 1) * block_size
                };
                let kind = if b + 1 == nb {
                    BlockKind::Identity
                } else if b < nb / 2 {
                    BlockKind::Cs(GROUP_BLOCK_CS_RHO)
                } else {
                    BlockKind::Ar(GROUP_BLOCK_AR_RHO)
                };
                (start, end, kind)
            })
            .collect()
    }

    /// Realize the covariance: draws the factor matrix for the factor
    /// setting and the dense Cholesky factor for the negative-rho compound
    /// case. Sampling and the quadratic form live on the realization so
    /// train/test draws share one Sigma.
    pub fn realize<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Covariance> {
        self.validate()?;
        let factor = match self.kind {
            CovKind::Factor { k } => Some(Array2::from_shape_simple_fn((self.p, k), || {
                standard_normal(rng)
            })),
            _ => None,
        };
        let chol = match self.kind {
            CovKind::CompoundSymmetry { rho } if rho < 0.0 => {
                use ndarray_linalg::{Cholesky, UPLO};
                assert!(
                    self.p <= 2000,
                    "dense covariance factor only supported for p <= 2000"
                );
                let spec = self.clone();
                let sigma = Covariance {
                    spec,
                    factor: None,
                    chol: None,
                }
                .dense();
                Some(
                    sigma
                        .cholesky(UPLO::Lower)
                        .map_err(|_| SparError::NonPositiveDefinite)?,
                )
            }
            _ => None,
        };
        Ok(Covariance {
            spec: self.clone(),
            factor,
            chol,
        })
    }
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
}

/// A realized covariance model: the spec plus any sampled structure state.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance {
    spec: CovarianceSpec,
    factor: Option<Array2<f64>>,
    chol: Option<Array2<f64>>,
}

impl Covariance {
    pub fn spec(&self) -> &CovarianceSpec {
        &self.spec
    }

    pub fn p(&self) -> usize {
        self.spec.p
    }

    /// The realized factor matrix of the factor setting.
    pub fn factor_matrix(&self) -> Option<&Array2<f64>> {
        self.factor.as_ref()
    }

    /// Smallest eigenvalue where a closed form exists.
    pub fn min_eigenvalue(&self) -> Option<f64> {
        let p = self.spec.p as f64;
        match self.spec.kind {
            CovKind::Independent => Some(1.0),
            CovKind::CompoundSymmetry { rho } => Some((1.0 - rho).min(1.0 - rho + p * rho)),
            CovKind::Factor { .. } => Some(0.01),
            _ => None,
        }
    }

    /// Draw n rows of `N(0, Sigma)` through the structure-exact factors.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Array2<f64> {
        let p = self.spec.p;
        let mut x = Array2::zeros((n, p));
        match &self.spec.kind {
            CovKind::Independent => {
                x.mapv_inplace(|_| 0.0);
                for v in x.iter_mut() {
                    *v = standard_normal(rng);
                }
            }
            CovKind::CompoundSymmetry { rho } => {
                if *rho >= 0.0 {
                    for i in 0..n {
                        fill_cs_row(x.row_mut(i), *rho, rng);
                    }
                } else {
                    let l = self.chol.as_ref().expect("dense factor realized");
                    for i in 0..n {
                        let e = Array1::from_shape_simple_fn(p, || standard_normal(rng));
                        x.row_mut(i).assign(&l.dot(&e));
                    }
                }
            }
            CovKind::Autoregressive { rho } => {
                for i in 0..n {
                    fill_ar_row(x.row_mut(i), *rho, rng);
                }
            }
            CovKind::GroupBlock { .. } => {
                for (start, end, kind) in self.spec.blocks() {
                    for i in 0..n {
                        let mut row = x.row_mut(i);
                        let mut seg = row.slice_mut(ndarray::s![start..end]);
                        match kind {
                            BlockKind::Identity => {
                                for v in seg.iter_mut() {
                                    *v = standard_normal(rng);
                                }
                            }
                            BlockKind::Cs(r) => fill_cs_row(seg.view_mut(), r, rng),
                            BlockKind::Ar(r) => fill_ar_row(seg.view_mut(), r, rng),
                        }
                    }
                }
            }
            CovKind::Factor { k } => {
                // x = F u + 0.1 e gives Cov = FF' + 0.01 I exactly.
                let f = self.factor.as_ref().expect("factor realized");
                let u = Array2::from_shape_simple_fn((n, *k), || standard_normal(rng));
                x = u.dot(&f.t());
                for v in x.iter_mut() {
                    *v += 0.1 * standard_normal(rng);
                }
            }
            CovKind::ExtremeCorrelation { a } => {
                let a = *a;
                let scale_act = (2.0_f64).sqrt().recip();
                let scale_inact = ((a + 1) as f64).sqrt().recip();
                for i in 0..n {
                    let z: Vec<f64> = (0..p).map(|_| standard_normal(rng)).collect();
                    let s: f64 = z[..a].iter().sum();
                    let mut row = x.row_mut(i);
                    for j in 0..p {
                        row[j] = if j < a {
                            (z[j] + standard_normal(rng)) * scale_act
                        } else {
                            (z[j] + s) * scale_inact
                        };
                    }
                }
            }
        }
        x
    }

    /// `beta' Sigma beta`, structure-exact (no dense materialization).
    pub fn quadratic_form(&self, beta: &Array1<f64>) -> f64 {
        assert_eq!(beta.len(), self.spec.p);
        match &self.spec.kind {
            CovKind::Independent => beta.dot(beta),
            CovKind::CompoundSymmetry { rho } => qf_cs(beta.as_slice().unwrap(), *rho),
            CovKind::Autoregressive { rho } => qf_ar(beta.as_slice().unwrap(), *rho),
            CovKind::GroupBlock { .. } => {
                let b = beta.as_slice().unwrap();
                self.spec
                    .blocks()
                    .iter()
                    .map(|&(start, end, kind)| match kind {
                        BlockKind::Identity => b[start..end].iter().map(|v| v * v).sum(),
                        BlockKind::Cs(r) => qf_cs(&b[start..end], r),
                        BlockKind::Ar(r) => qf_ar(&b[start..end], r),
                    })
                    .sum()
            }
            CovKind::Factor { .. } => {
                let f = self.factor.as_ref().expect("factor realized");
                let fb = f.t().dot(beta);
                fb.dot(&fb) + 0.01 * beta.dot(beta)
            }
            CovKind::ExtremeCorrelation { a } => {
                let a = *a;
                let b = beta.as_slice().unwrap();
                let (act, inact) = b.split_at(a.min(b.len()));
                let ss_a: f64 = act.iter().map(|v| v * v).sum();
                let sum_a: f64 = act.iter().sum();
                let ss_b: f64 = inact.iter().map(|v| v * v).sum();
                let sum_b: f64 = inact.iter().sum();
                let af = a as f64;
                ss_a + ss_b / (af + 1.0)
                    + af / (af + 1.0) * sum_b * sum_b
                    + 2.0 * sum_a * sum_b / (2.0 * (af + 1.0)).sqrt()
            }
        }
    }

    /// Materialize Sigma (desk-scale oracle; p <= 2000 only).
    pub fn dense(&self) -> Array2<f64> {
        let p = self.spec.p;
        assert!(p <= 2000, "dense Sigma is limited to p <= 2000");
        match &self.spec.kind {
            CovKind::Independent => Array2::eye(p),
            CovKind::CompoundSymmetry { rho } => {
                Array2::from_shape_fn((p, p), |(i, j)| if i == j { 1.0 } else { *rho })
            }
            CovKind::Autoregressive { rho } => {
                Array2::from_shape_fn((p, p), |(i, j)| rho.powi((i as i32 - j as i32).abs()))
            }
            CovKind::GroupBlock { .. } => {
                let mut sigma = Array2::zeros((p, p));
                for (start, end, kind) in self.spec.blocks() {
                    for i in start..end {
                        for j in start..end {
                            sigma[[i, j]] = match kind {
                                BlockKind::Identity => f64::from(i == j),
                                BlockKind::Cs(r) => {
                                    if i == j {
                                        1.0
                                    } else {
                                        r
                                    }
                                }
                                BlockKind::Ar(r) => r.powi((i as i32 - j as i32).abs()),
                            };
                        }
                    }
                }
                sigma
            }
            CovKind::Factor { .. } => {
                let f = self.factor.as_ref().expect("factor realized");
                let mut sigma = f.dot(&f.t());
                for i in 0..p {
                    sigma[[i, i]] += 0.01;
                }
                sigma
            }
            CovKind::ExtremeCorrelation { a } => {
                // Independent route from the latent loadings: Sigma = A A'
                // with A the (p x (p+a)) loading matrix of (z, w).
                let a = *a;
                let mut load = Array2::zeros((p, p + a));
                let s_act = (2.0_f64).sqrt().recip();
                let s_in = ((a + 1) as f64).sqrt().recip();
                for j in 0..p {
                    if j < a {
                        load[[j, j]] = s_act;
                        load[[j, p + j]] = s_act;
                    } else {
                        load[[j, j]] = s_in;
                        for k in 0..a {
                            load[[j, k]] += s_in;
                        }
                    }
                }
                load.dot(&load.t())
            }
        }
    }
}

fn fill_cs_row<R: Rng + ?Sized>(mut row: ndarray::ArrayViewMut1<'_, f64>, rho: f64, rng: &mut R) {
    // One shared factor: x_j = sqrt(rho) g + sqrt(1-rho) e_j.
    let g = standard_normal(rng);
    let (sr, se) = (rho.sqrt(), (1.0 - rho).sqrt());
    for v in row.iter_mut() {
        *v = sr * g + se * standard_normal(rng);
    }
}

fn fill_ar_row<R: Rng + ?Sized>(mut row: ndarray::ArrayViewMut1<'_, f64>, rho: f64, rng: &mut R) {
    // Stationary AR(1) recursion is the banded Cholesky factor applied to
    // iid normals.
    let scale = (1.0 - rho * rho).sqrt();
    let mut prev = standard_normal(rng);
    row[0] = prev;
    for j in 1..row.len() {
        prev = rho * prev + scale * standard_normal(rng);
        row[j] = prev;
    }
}

fn qf_cs(beta: &[f64], rho: f64) -> f64 {
    let sum: f64 = beta.iter().sum();
    let ss: f64 = beta.iter().map(|v| v * v).sum();
    rho * sum * sum + (1.0 - rho) * ss
}

fn qf_ar(beta: &[f64], rho: f64) -> f64 {
    // (Sigma beta)_i = f_i + b_i with forward/backward geometric recursions.
    let p = beta.len();
    let mut out = 0.0;
    let mut fwd = 0.0;
    let mut fwds = vec![0.0; p];
    for i in 0..p {
        fwd = rho * fwd + beta[i];
        fwds[i] = fwd;
    }
    let mut bwd = 0.0;
    for i in (0..p).rev() {
        out += beta[i] * (fwds[i] + bwd);
        bwd = rho * (bwd + beta[i]);
    }
    out
}

/// Shape of the coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientRegime {
    /// a = round(2 log p), uniform positions, Fan-Lv magnitudes.
    Sparse,
    /// a = round(n/2 + 2 log p), uniform positions, Fan-Lv magnitudes.
    Medium,
    /// a = round(p/4), uniform positions, Fan-Lv magnitudes.
    Dense,
    /// First a coefficients form the ladder beta_j = j.
    ExtremeLadder,
    /// First a coefficients drawn uniformly from +-{1,2,3}.
    ExampleOne,
}

/// Coefficient description: regime plus resolved active count.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSpec {
    pub regime: CoefficientRegime,
    pub a: usize,
}

/// Active count implied by the sparsity level, rounded to the closest
/// integer and clamped into `1..=p`. Returns None for the regimes whose a is
/// chosen by the caller.
pub fn derived_active_count(regime: CoefficientRegime, n: usize, p: usize) -> Option<usize> {
    let raw = match regime {
        CoefficientRegime::Sparse => 2.0 * (p as f64).ln(),
        CoefficientRegime::Medium => n as f64 / 2.0 + 2.0 * (p as f64).ln(),
        CoefficientRegime::Dense => p as f64 / 4.0,
        CoefficientRegime::ExtremeLadder | CoefficientRegime::ExampleOne => return None,
    };
    Some((raw.round() as usize).clamp(1, p))
}

impl CoefficientSpec {
    pub fn derived(regime: CoefficientRegime, n: usize, p: usize) -> Result<Self> {
        let a = derived_active_count(regime, n, p).ok_or_else(|| {
            SparError::InvalidConfig(format!("regime {regime:?} needs an explicit active count"))
        })?;
        Ok(CoefficientSpec { regime, a })
    }

    pub fn with_active_count(regime: CoefficientRegime, a: usize) -> Self {
        CoefficientSpec { regime, a }
    }
}

/// Draw a coefficient vector for the regime. `n` enters only through the
/// Fan-Lv magnitude floor `4 log(n)/sqrt(n)`.
pub fn sample_coefficients<R: Rng + ?Sized>(
    spec: &CoefficientSpec,
    n: usize,
    p: usize,
    rng: &mut R,
) -> Array1<f64> {
    assert!(spec.a >= 1 && spec.a <= p, "need 1 <= a <= p");
    let mut beta = Array1::zeros(p);
    match spec.regime {
        CoefficientRegime::Sparse | CoefficientRegime::Medium | CoefficientRegime::Dense => {
            let mut positions = rand::seq::index::sample(rng, p, spec.a).into_vec();
            positions.sort_unstable();
            let floor = 4.0 * (n as f64).ln() / (n as f64).sqrt();
            for j in positions {
                let negative = rng.random::<f64>() < 0.4;
                let z: f64 = standard_normal(rng);
                let magnitude = floor + z.abs();
                beta[j] = if negative { -magnitude } else { magnitude };
            }
        }
        CoefficientRegime::ExtremeLadder => {
            for j in 0..spec.a {
                beta[j] = (j + 1) as f64;
            }
        }
        CoefficientRegime::ExampleOne => {
            for j in 0..spec.a {
                let magnitude = rng.random_range(1..=3) as f64;
                beta[j] = if rng.random::<bool>() {
                    magnitude
                } else {
                    -magnitude
                };
            }
        }
    }
    beta
}

/// Draw train and test datasets from `y = mu + x'beta + eps` with the noise
/// variance set so that `beta' Sigma beta / sigma^2 = rho_snr`. Both
/// datasets carry the realized truth.
pub fn generate(
    setting: &CovarianceSpec,
    coef: &CoefficientSpec,
    n: usize,
    n_test: usize,
    rho_snr: f64,
    mu: f64,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    if rho_snr <= 0.0 || rho_snr.is_nan() {
        return Err(SparError::InvalidConfig(format!(
            "rho_snr must be positive, got {rho_snr}"
        )));
    }
    if let CovKind::ExtremeCorrelation { a } = setting.kind {
        if a != coef.a {
            return Err(SparError::InvalidConfig(format!(
                "extreme-correlation block size {a} must match active count {}",
                coef.a
            )));
        }
    }
    let mut rng = rng_from_seed(seed);
    let cov = setting.realize(&mut rng)?;
    let beta = sample_coefficients(coef, n, setting.p, &mut rng);
    let sigma2 = cov.quadratic_form(&beta) / rho_snr;
    let sigma = sigma2.sqrt();
    let truth = Truth::new(beta.clone(), mu, sigma2);

    let draw = |rows: usize, rng: &mut crate::seed::SparRng| -> Result<Dataset> {
        let x = cov.sample(rows, rng);
        let mut y = x.dot(&beta);
        for v in y.iter_mut() {
            *v += mu + sigma * standard_normal(rng);
        }
        Dataset::with_truth(x, y, truth.clone())
    };
    let train = draw(n, &mut rng)?;
    let test = draw(n_test, &mut rng)?;
    Ok((train, test))
}

/// The compound-symmetry testbed used throughout the method sections:
/// rho = 0.5 and the first `a` coefficients uniform from +-{1,2,3}.
pub fn example_one(p: usize, a: usize) -> (CovarianceSpec, CoefficientSpec) {
    (
        CovarianceSpec::new(CovKind::CompoundSymmetry { rho: 0.5 }, p),
        CoefficientSpec::with_active_count(CoefficientRegime::ExampleOne, a),
    )
}

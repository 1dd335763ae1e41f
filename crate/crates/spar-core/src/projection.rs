//! Random projections for column-wise dimension reduction: dense Gaussian
//! and sparse sign matrices, and the CW (count-sketch style) projection with
//! data-informed diagonals, plus the closed-form theory companions
//! (coefficient projection, prediction-gain bound, preimage moments).

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, SparError};

/// Sparse row-structured projection `Phi = B D`: column `j` contributes
/// `d[j]` to goal dimension `h[j]`. Goal dimensions left empty by the random
/// map are discarded and the rest renumbered contiguously, so every
/// dimension in `0..m` is attained and carries at least one nonzero
/// diagonal entry (full row rank).
#[derive(Debug, Clone, PartialEq)]
pub struct CwProjection {
    m: usize,
    p_cols: usize,
    h: Vec<usize>,
    d: Vec<f64>,
}

/// How CW diagonal entries are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum DiagonalPolicy {
    /// Independent uniform signs, the conventional choice.
    RandomSign,
    /// Caller-supplied values (one per column), typically estimated
    /// coefficients. Goal dimensions whose columns all carry zeros get one
    /// minimal-magnitude signed entry injected to keep full row rank.
    Values(Vec<f64>),
}

impl CwProjection {
    /// Draw `h` uniformly over `m_target` goal dimensions and build the
    /// projection under the given diagonal policy.
    pub fn draw<R: Rng + ?Sized>(
        m_target: usize,
        p: usize,
        policy: &DiagonalPolicy,
        rng: &mut R,
    ) -> Result<Self> {
        assert!(m_target >= 1 && m_target <= p, "need 1 <= m_target <= p");
        let h_raw: Vec<usize> = (0..p).map(|_| rng.random_range(0..m_target)).collect();
        Self::from_map(&h_raw, m_target, policy, rng)
    }

    /// Build from a fixed goal-dimension map (values in `0..m_target`).
    /// Exposed so tests and oracles can inject deterministic structure.
    pub fn from_map<R: Rng + ?Sized>(
        h_raw: &[usize],
        m_target: usize,
        policy: &DiagonalPolicy,
        rng: &mut R,
    ) -> Result<Self> {
        let p = h_raw.len();
        assert!(p >= 1, "projection needs at least one column");
        assert!(
            h_raw.iter().all(|&g| g < m_target),
            "goal dimensions must lie in 0..m_target"
        );

        // Discard unattained goal dimensions, renumbering contiguously and
        // preserving relative order.
        let mut attained = vec![false; m_target];
        for &g in h_raw {
            attained[g] = true;
        }
        let mut renumber = vec![usize::MAX; m_target];
        let mut m = 0;
        for g in 0..m_target {
            if attained[g] {
                renumber[g] = m;
                m += 1;
            }
        }
        let h: Vec<usize> = h_raw.iter().map(|&g| renumber[g]).collect();

        let d = match policy {
            DiagonalPolicy::RandomSign => (0..p)
                .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                .collect(),
            DiagonalPolicy::Values(v) => {
                assert_eq!(v.len(), p, "diagonal value vector length must equal p");
                let min_nonzero = v
                    .iter()
                    .filter(|x| **x != 0.0)
                    .fold(f64::INFINITY, |acc, x| acc.min(x.abs()));
                if !min_nonzero.is_finite() {
                    return Err(SparError::AllZeroValues);
                }
                let mut d = v.clone();
                // Full-rank adaption: a goal dimension whose columns all
                // carry zero gets a signed minimal-magnitude entry on its
                // smallest column index.
                for dim in 0..m {
                    let mut first = usize::MAX;
                    let mut any_nonzero = false;
                    for j in 0..p {
                        if h[j] == dim {
                            first = first.min(j);
                            any_nonzero |= d[j] != 0.0;
                        }
                    }
                    if !any_nonzero {
                        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        d[first] = sign * min_nonzero;
                    }
                }
                d
            }
        };

        Ok(CwProjection { m, p_cols: p, h, d })
    }

    /// Goal dimension after discarding empty rows.
    pub fn reduced_dim(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.p_cols
    }

    pub fn goal_map(&self) -> &[usize] {
        &self.h
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.d
    }

    /// Reduced predictors `Z = X Phi'`, computed in O(n p) without
    /// materializing `Phi`.
    pub fn apply(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.p_cols {
            return Err(SparError::DimensionMismatch {
                expected: self.p_cols,
                found: x.ncols(),
            });
        }
        let n = x.nrows();
        let mut z = Array2::zeros((n, self.m));
        for i in 0..n {
            let row = x.row(i);
            for j in 0..self.p_cols {
                z[[i, self.h[j]]] += self.d[j] * row[j];
            }
        }
        Ok(z)
    }

    /// `Phi' gamma`, the expansion of reduced-space coefficients back to
    /// column space.
    pub fn expand(&self, gamma: &Array1<f64>) -> Array1<f64> {
        assert_eq!(gamma.len(), self.m);
        Array1::from_shape_fn(self.p_cols, |j| self.d[j] * gamma[self.h[j]])
    }

    /// Materialize `Phi` as a dense m-by-p matrix (test and oracle use).
    pub fn densify(&self) -> Array2<f64> {
        let mut phi = Array2::zeros((self.m, self.p_cols));
        for j in 0..self.p_cols {
            phi[[self.h[j], j]] = self.d[j];
        }
        phi
    }
}

/// Orthogonal projection of `beta` onto the row span of `Phi` through the
/// per-bucket closed form
/// `beta~_j = d_j * (sum_{k: h_k=h_j} d_k beta_k) / (sum_{k: h_k=h_j} d_k^2)`.
pub fn project_coefficient(proj: &CwProjection, beta: &Array1<f64>) -> Array1<f64> {
    assert_eq!(beta.len(), proj.p_cols);
    let mut num = vec![0.0; proj.m];
    let mut den = vec![0.0; proj.m];
    for j in 0..proj.p_cols {
        num[proj.h[j]] += proj.d[j] * beta[j];
        den[proj.h[j]] += proj.d[j] * proj.d[j];
    }
    Array1::from_shape_fn(proj.p_cols, |j| proj.d[j] * num[proj.h[j]] / den[proj.h[j]])
}

/// Dense random projection matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseProjection {
    pub matrix: Array2<f64>,
    pub kind: DenseKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DenseKind {
    Gaussian,
    /// Entries are 0 with probability `1 - psi` and otherwise
    /// `+-1/sqrt(psi)` with equal probability.
    Sparse(f64),
}

/// m-by-p matrix of iid standard normal entries.
pub fn gaussian_projection<R: Rng + ?Sized>(m: usize, p: usize, rng: &mut R) -> DenseProjection {
    assert!(m >= 1 && m <= p, "need 1 <= m <= p");
    let matrix = Array2::from_shape_simple_fn((m, p), || {
        <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
    });
    DenseProjection {
        matrix,
        kind: DenseKind::Gaussian,
    }
}

/// Sparse sign matrix with sparsity parameter `psi` in (0, 1].
pub fn sparse_projection<R: Rng + ?Sized>(
    m: usize,
    p: usize,
    psi: f64,
    rng: &mut R,
) -> Result<DenseProjection> {
    assert!(m >= 1 && m <= p, "need 1 <= m <= p");
    if !(psi > 0.0 && psi <= 1.0) {
        return Err(SparError::InvalidConfig(format!(
            "psi must lie in (0, 1], got {psi}"
        )));
    }
    let scale = 1.0 / psi.sqrt();
    let matrix = Array2::from_shape_simple_fn((m, p), || {
        let u: f64 = rng.random();
        if u < psi / 2.0 {
            scale
        } else if u < psi {
            -scale
        } else {
            0.0
        }
    });
    Ok(DenseProjection {
        matrix,
        kind: DenseKind::Sparse(psi),
    })
}

impl DenseProjection {
    pub fn reduced_dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Reduced predictors `Z = X Phi'`.
    pub fn apply(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.matrix.ncols() {
            return Err(SparError::DimensionMismatch {
                expected: self.matrix.ncols(),
                found: x.ncols(),
            });
        }
        Ok(x.dot(&self.matrix.t()))
    }
}

/// Lower bound on the expected squared-prediction-error gain of the
/// coefficient-proportional CW diagonal over random signs:
/// `||beta||^2 lambda_min (1 - 2m/p)
///  + (a/(p-1)) m lambda_min tau^2 (1 - (m+1)/(p-1))`,
/// with the quadratic-order remainder dropped. May be negative for large
/// `m/p`; returned as-is.
pub fn theorem1_bound(
    beta: &Array1<f64>,
    lambda_min: f64,
    m: usize,
    p: usize,
    a: usize,
    tau: f64,
) -> Result<f64> {
    assert!(m < p, "need m < p");
    assert!(a >= 1, "need at least one active variable");
    assert!(lambda_min > 0.0, "lambda_min must be positive");
    let actual_tau = beta
        .iter()
        .filter(|b| **b != 0.0)
        .fold(f64::INFINITY, |acc, b| acc.min(b.abs()));
    if !actual_tau.is_finite() || (tau - actual_tau).abs() > 1e-12 {
        return Err(SparError::InconsistentTau {
            given: tau,
            actual: actual_tau,
        });
    }
    let norm2: f64 = beta.iter().map(|b| b * b).sum();
    let (mf, pf, af) = (m as f64, p as f64, a as f64);
    let first = norm2 * lambda_min * (1.0 - 2.0 * mf / pf);
    let second = af / (pf - 1.0) * mf * lambda_min * tau * tau * (1.0 - (mf + 1.0) / (pf - 1.0));
    Ok(first + second)
}

/// Closed-form moments of the inverse preimage size `1/|h^{-1}(h_j)|` under
/// a uniform random map `h: [p] -> [m]`.
///
/// The first moment `(m/p)(1 - ((m-1)/m)^p)` is exact; the second is the
/// cubic-order approximation `m^2/(p-1)^2 + (m-3) m^2/(p-1)^3`.
pub fn inverse_preimage_moments(p: usize, m: usize) -> (f64, f64) {
    assert!(p >= 2 && m >= 1 && m <= p, "need 1 <= m <= p, p >= 2");
    let (mf, pf) = (m as f64, p as f64);
    let first = mf / pf * (1.0 - ((mf - 1.0) / mf).powi(p as i32));
    let second = mf * mf / (pf - 1.0).powi(2) + (mf - 3.0) * mf * mf / (pf - 1.0).powi(3);
    (first, second)
}

/// Closed-form moments of `|A \cap h^{-1}(h_j) \ {j}| / |h^{-1}(h_j)|^r`
/// for r = 1 (exact) and r = 2 (cubic-order approximation), where `A` is an
/// active set of size `a` and `j` is active or not.
pub fn active_ratio_moments(p: usize, m: usize, a: usize, j_active: bool) -> (f64, f64) {
    assert!(p >= 2 && m >= 1 && m <= p, "need 1 <= m <= p, p >= 2");
    assert!(a >= 1 && a < p, "need 1 <= a < p");
    let a_j = (a - usize::from(j_active)) as f64;
    let (mf, pf) = (m as f64, p as f64);
    let inv_first = mf / pf * (1.0 - ((mf - 1.0) / mf).powi(p as i32));
    let first = a_j / (pf - 1.0) * (1.0 - inv_first);
    let second = mf * a_j / (pf - 1.0) * (1.0 / (pf - 1.0) - (mf + 1.0) / (pf - 1.0).powi(2));
    (first, second)
}

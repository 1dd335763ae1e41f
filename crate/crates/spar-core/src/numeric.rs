//! Dense linear-algebra primitives: dual-form Ridge, HOLP and reduced-space
//! least squares.
//!
//! All Gram solves go through one symmetric positive-definite ladder:
//! exact Cholesky, then a tiny trace-scaled jitter, then any caller-supplied
//! jitter. Coefficients are returned in the units of the inputs; callers that
//! standardize are responsible for back-transforming.

use ndarray::{Array1, Array2};
use ndarray_linalg::{FactorizeC, SolveC, UPLO};

use crate::error::{Result, SparError};

fn all_finite(v: &Array1<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn cholesky_solve(a: &Array2<f64>, b: &Array1<f64>) -> Option<Array1<f64>> {
    let f = a.factorizec(UPLO::Lower).ok()?;
    let x = f.solvec(b).ok()?;
    // LAPACK happily propagates NaN inputs into a "successful" solve.
    all_finite(&x).then_some(x)
}

/// Solve the SPD system `a x = b` with the retry ladder
/// exact -> jitter `1e-10 * trace / dim` -> `caller_jitter`.
pub(crate) fn spd_solve(
    a: &Array2<f64>,
    b: &Array1<f64>,
    caller_jitter: f64,
) -> Result<Array1<f64>> {
    if let Some(x) = cholesky_solve(a, b) {
        return Ok(x);
    }
    let dim = a.nrows();
    let trace: f64 = a.diag().sum();
    let tiny = 1e-10 * trace / dim as f64;
    for jitter in [tiny, caller_jitter] {
        if jitter > 0.0 && jitter.is_finite() {
            let mut aj = a.clone();
            for i in 0..dim {
                aj[[i, i]] += jitter;
            }
            if let Some(x) = cholesky_solve(&aj, b) {
                return Ok(x);
            }
        }
    }
    Err(SparError::SingularGram)
}

fn gram_rows(x: &Array2<f64>) -> Array2<f64> {
    x.dot(&x.t())
}

/// Ridge coefficient in its dual form `X' (lambda I_n + X X')^{-1} y`,
/// equal to the primal `(X'X + lambda I_p)^{-1} X'y` but solving an
/// n-by-n system, which is what makes p >> n tractable.
pub fn ridge_dual(x: &Array2<f64>, y: &Array1<f64>, lambda: f64) -> Result<Array1<f64>> {
    if lambda <= 0.0 || lambda.is_nan() {
        return Err(SparError::InvalidConfig(format!(
            "ridge penalty must be positive, got {lambda}"
        )));
    }
    if x.nrows() != y.len() {
        return Err(SparError::DimensionMismatch {
            expected: x.nrows(),
            found: y.len(),
        });
    }
    let n = x.nrows();
    let mut g = gram_rows(x);
    for i in 0..n {
        g[[i, i]] += lambda;
    }
    let u = spd_solve(&g, y, 0.0).map_err(|_| SparError::SingularSystem)?;
    Ok(x.t().dot(&u))
}

/// HOLP coefficient `X' (X X')^{-1} y`: the minimum-norm solution of
/// `X beta = y` when `X X'` has full rank.
///
/// With `jitter > 0` this returns the ridge-style `X' (jitter I + X X')^{-1} y`
/// instead. With `jitter = 0` the interpolation residual is verified and
/// `SingularGram` is reported when the Gram matrix is numerically singular,
/// in which case retrying with a positive jitter is the intended recovery.
pub fn holp(x: &Array2<f64>, y: &Array1<f64>, jitter: f64) -> Result<Array1<f64>> {
    if x.nrows() != y.len() {
        return Err(SparError::DimensionMismatch {
            expected: x.nrows(),
            found: y.len(),
        });
    }
    let n = x.nrows();
    let mut g = gram_rows(x);
    if jitter > 0.0 {
        for i in 0..n {
            g[[i, i]] += jitter;
        }
    }
    let u = spd_solve(&g, y, 0.0)?;
    let beta = x.t().dot(&u);
    if jitter == 0.0 {
        let resid = x.dot(&beta) - y;
        let tol = 1e-8 * y.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        if resid.iter().any(|r| r.abs() > tol) {
            return Err(SparError::SingularGram);
        }
    }
    Ok(beta)
}

/// Least squares in a reduced space: `(Z'Z)^{-1} Z'y`, with optional jitter
/// on the Gram diagonal.
pub fn ols_reduced(z: &Array2<f64>, y: &Array1<f64>, jitter: f64) -> Result<Array1<f64>> {
    let (n, m) = (z.nrows(), z.ncols());
    if n != y.len() {
        return Err(SparError::DimensionMismatch {
            expected: n,
            found: y.len(),
        });
    }
    if m >= n {
        return Err(SparError::DegenerateReducedFit { m, n });
    }
    let g = z.t().dot(z);
    let rhs = z.t().dot(y);
    spd_solve(&g, &rhs, jitter)
}

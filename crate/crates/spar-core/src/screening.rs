//! Variable screening: marginal-correlation and HOLP importance scores,
//! deterministic top-k selection, probabilistic subset draws and
//! screening-quality measures.

use ndarray::{Array1, Axis};
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::dataset::Dataset;
use crate::error::{Result, SparError};
use crate::numeric::{holp, ridge_dual};

/// Where a score vector came from.
#[derive(Debug, Clone, PartialEq)]
pub enum ScoreSource {
    MarginalCorrelation,
    Holp,
    RidgeFixed(f64),
    RidgeCv,
}

/// Nonnegative importance weights, one per predictor.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreeningScores {
    pub scores: Array1<f64>,
    pub source: ScoreSource,
}

impl ScreeningScores {
    pub fn p(&self) -> usize {
        self.scores.len()
    }

    fn positive_indices(&self) -> Vec<usize> {
        self.scores
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 0.0)
            .map(|(j, _)| j)
            .collect()
    }
}

/// Absolute sample correlation of each column with the response; constant
/// columns score 0.
pub fn marginal_correlation_scores(data: &Dataset) -> Result<ScreeningScores> {
    let n = data.n();
    if n < 3 {
        return Err(SparError::TooFewObservations { n, required: 3 });
    }
    let nf = n as f64;
    let y_mean = data.y.sum() / nf;
    let yc = data.y.mapv(|v| v - y_mean);
    let y_ss: f64 = yc.iter().map(|v| v * v).sum();
    if y_ss == 0.0 {
        return Err(SparError::ZeroVarianceResponse);
    }
    let mut scores = Array1::zeros(data.p());
    for (j, col) in data.x.axis_iter(Axis(1)).enumerate() {
        let mean = col.sum() / nf;
        let mut xy = 0.0;
        let mut xx = 0.0;
        for (xi, yi) in col.iter().zip(yc.iter()) {
            let xc = xi - mean;
            xy += xc * yi;
            xx += xc * xc;
        }
        scores[j] = if xx == 0.0 {
            0.0
        } else {
            (xy / (xx.sqrt() * y_ss.sqrt())).abs()
        };
    }
    Ok(ScreeningScores {
        scores,
        source: ScoreSource::MarginalCorrelation,
    })
}

/// Absolute HOLP coefficients as importance weights. Meant for standardized
/// data with p > n; errors from the underlying solve are propagated.
pub fn holp_scores(data: &Dataset) -> Result<ScreeningScores> {
    let beta = holp(&data.x, &data.y, 0.0)?;
    Ok(ScreeningScores {
        scores: beta.mapv(f64::abs),
        source: ScoreSource::Holp,
    })
}

/// Absolute ridge coefficients at a fixed penalty, the screening comparator
/// with lambda = sqrt(n) + sqrt(p) recommended near degeneracy.
pub fn ridge_scores(data: &Dataset, lambda: f64) -> Result<ScreeningScores> {
    let beta = ridge_dual(&data.x, &data.y, lambda)?;
    Ok(ScreeningScores {
        scores: beta.mapv(f64::abs),
        source: ScoreSource::RidgeFixed(lambda),
    })
}

/// Indices of the k largest scores, ties broken by ascending column index.
/// Returned ascending.
pub fn top_k(scores: &ScreeningScores, k: usize) -> Vec<usize> {
    let p = scores.p();
    assert!(k >= 1 && k <= p, "top_k requires 1 <= k <= p");
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| {
        scores.scores[b]
            .total_cmp(&scores.scores[a])
            .then(a.cmp(&b))
    });
    let mut picked = order[..k].to_vec();
    picked.sort_unstable();
    picked
}

/// Result of a probabilistic screening draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenDraw {
    /// Selected indices, ascending.
    pub indices: Vec<usize>,
    /// True when fewer strictly positive scores than `size` were available
    /// and the draw was downgraded instead of failing.
    pub downgraded: bool,
}

/// Draw `size` distinct indices without replacement, each step proportional
/// to the remaining scores (the sequential renormalization law).
///
/// Implemented with Efraimidis-Spirakis exponential keys
/// `E_j / score_j`, whose k smallest keys realize exactly that law.
pub fn probabilistic_screen<R: Rng + ?Sized>(
    scores: &ScreeningScores,
    size: usize,
    rng: &mut R,
) -> ScreenDraw {
    assert!(size >= 1, "screen size must be at least 1");
    let positive = scores.positive_indices();
    let k = size.min(positive.len());
    let mut keyed: Vec<(f64, usize)> = positive
        .into_iter()
        .map(|j| {
            let e: f64 = Exp1.sample(rng);
            (e / scores.scores[j], j)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut indices: Vec<usize> = keyed[..k].iter().map(|&(_, j)| j).collect();
    indices.sort_unstable();
    ScreenDraw {
        indices,
        downgraded: k < size,
    }
}

/// Screening-quality measures of a selected index set against the truth.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreeningReport {
    pub k: usize,
    pub precision: f64,
    pub recall: f64,
    /// Fraction of selected true actives whose estimate has the right sign.
    pub sign_ratio: f64,
    /// Pearson correlation of estimate vs truth over selected true actives;
    /// 0 when fewer than two such pairs exist.
    pub coef_correlation: f64,
}

/// Evaluate a selection `selected` of columns with estimated coefficients
/// `estimate` against the true coefficient vector `truth`.
pub fn screening_report(
    selected: &[usize],
    estimate: &Array1<f64>,
    truth: &Array1<f64>,
) -> ScreeningReport {
    let k = selected.len();
    let a = truth.iter().filter(|&&b| b != 0.0).count();
    let hits: Vec<usize> = selected
        .iter()
        .copied()
        .filter(|&j| truth[j] != 0.0)
        .collect();
    let precision = if k == 0 {
        0.0
    } else {
        hits.len() as f64 / k as f64
    };
    let recall = if a == 0 {
        0.0
    } else {
        hits.len() as f64 / a as f64
    };

    let sign_ratio = if hits.is_empty() {
        0.0
    } else {
        let ok = hits
            .iter()
            .filter(|&&j| estimate[j].signum() == truth[j].signum())
            .count();
        ok as f64 / hits.len() as f64
    };

    let coef_correlation = if hits.len() < 2 {
        0.0
    } else {
        let xs: Vec<f64> = hits.iter().map(|&j| estimate[j]).collect();
        let ys: Vec<f64> = hits.iter().map(|&j| truth[j]).collect();
        pearson(&xs, &ys)
    };

    ScreeningReport {
        k,
        precision,
        recall,
        sign_ratio,
        coef_correlation,
    }
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx).powi(2);
        syy += (yi - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx.sqrt() * syy.sqrt())
    }
}

//! Evaluation measures: relative and absolute prediction error and
//! variable-selection scores.

use ndarray::Array1;

use crate::error::{Result, SparError};

/// One method's evaluation on a test set.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub rmspe: f64,
    pub mspe: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub num_active: usize,
    /// Wall-clock fit+predict time; None when timing is disabled for
    /// byte-reproducible output.
    pub runtime_seconds: Option<f64>,
}

/// Mean squared prediction error.
pub fn mspe(y_hat: &Array1<f64>, y_test: &Array1<f64>) -> f64 {
    assert_eq!(y_hat.len(), y_test.len());
    y_hat
        .iter()
        .zip(y_test.iter())
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / y_test.len() as f64
}

/// Relative mean squared prediction error
/// `sum (y_hat - y)^2 / sum (y - y_bar)^2`, normalized so the naive
/// zero-coefficient model (predicting the training mean `y_bar_train`)
/// scores 1.
pub fn rmspe(y_hat: &Array1<f64>, y_test: &Array1<f64>, y_bar_train: f64) -> Result<f64> {
    if y_hat.len() != y_test.len() {
        return Err(SparError::DimensionMismatch {
            expected: y_test.len(),
            found: y_hat.len(),
        });
    }
    let num: f64 = y_hat
        .iter()
        .zip(y_test.iter())
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    let den: f64 = y_test.iter().map(|y| (y - y_bar_train).powi(2)).sum();
    if den <= 0.0 {
        return Err(SparError::DegenerateDenominator);
    }
    Ok(num / den)
}

/// Support-recovery scores of an estimated coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub num_active: usize,
}

/// Precision, recall, F1 and the estimated active-set size, by indicator
/// counts over the supports. An all-zero estimate scores 0 across the board.
pub fn selection_scores(beta_hat: &Array1<f64>, beta_true: &Array1<f64>) -> SelectionScores {
    assert_eq!(beta_hat.len(), beta_true.len());
    let mut both = 0usize;
    let mut est = 0usize;
    let mut act = 0usize;
    for (h, t) in beta_hat.iter().zip(beta_true.iter()) {
        let eh = *h != 0.0;
        let et = *t != 0.0;
        both += usize::from(eh && et);
        est += usize::from(eh);
        act += usize::from(et);
    }
    let precision = if est == 0 {
        0.0
    } else {
        both as f64 / est as f64
    };
    let recall = if act == 0 {
        0.0
    } else {
        both as f64 / act as f64
    };
    let f1 = if precision > 0.0 && recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    SelectionScores {
        precision,
        recall,
        f1,
        num_active: est,
    }
}

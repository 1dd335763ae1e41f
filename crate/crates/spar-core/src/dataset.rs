//! Regression data containers, standardization and CSV interchange.

use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SparError};

/// Ground-truth metadata carried by simulated datasets.
#[derive(Debug, Clone, PartialEq)]
pub struct Truth {
    pub beta: Array1<f64>,
    pub mu: f64,
    pub sigma2: f64,
    /// Indices with `beta[j] != 0`, ascending.
    pub active_set: Vec<usize>,
}

impl Truth {
    pub fn new(beta: Array1<f64>, mu: f64, sigma2: f64) -> Self {
        let active_set = beta
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0.0)
            .map(|(j, _)| j)
            .collect();
        Truth {
            beta,
            mu,
            sigma2,
            active_set,
        }
    }
}

/// A predictor matrix with its response vector and optional simulation truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub y: Array1<f64>,
    pub truth: Option<Truth>,
}

impl Dataset {
    pub fn new(x: Array2<f64>, y: Array1<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(SparError::DimensionMismatch {
                expected: x.nrows(),
                found: y.len(),
            });
        }
        Ok(Dataset { x, y, truth: None })
    }

    pub fn with_truth(x: Array2<f64>, y: Array1<f64>, truth: Truth) -> Result<Self> {
        let mut ds = Dataset::new(x, y)?;
        if truth.beta.len() != ds.p() {
            return Err(SparError::DimensionMismatch {
                expected: ds.p(),
                found: truth.beta.len(),
            });
        }
        ds.truth = Some(truth);
        Ok(ds)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}

/// Captured centering/scaling transform. Scales use the sample standard
/// deviation with divisor n-1; constant columns keep scale 1 and are listed
/// in `constant_columns`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub x_center: Vec<f64>,
    pub x_scale: Vec<f64>,
    pub y_center: f64,
    pub y_scale: f64,
    pub constant_columns: Vec<usize>,
}

impl Standardization {
    /// Apply the transform to new data on the original scale.
    pub fn apply(&self, x: &Array2<f64>, y: &Array1<f64>) -> (Array2<f64>, Array1<f64>) {
        let mut xs = x.clone();
        for (j, mut col) in xs.axis_iter_mut(Axis(1)).enumerate() {
            let (c, s) = (self.x_center[j], self.x_scale[j]);
            col.mapv_inplace(|v| (v - c) / s);
        }
        let ys = y.mapv(|v| (v - self.y_center) / self.y_scale);
        (xs, ys)
    }

    /// Invert the transform, recovering original-scale data.
    pub fn invert(&self, x_std: &Array2<f64>, y_std: &Array1<f64>) -> (Array2<f64>, Array1<f64>) {
        let mut x = x_std.clone();
        for (j, mut col) in x.axis_iter_mut(Axis(1)).enumerate() {
            let (c, s) = (self.x_center[j], self.x_scale[j]);
            col.mapv_inplace(|v| v * s + c);
        }
        let y = y_std.mapv(|v| v * self.y_scale + self.y_center);
        (x, y)
    }
}

fn column_moments(col: ndarray::ArrayView1<'_, f64>) -> (f64, f64) {
    let n = col.len() as f64;
    let mean = col.sum() / n;
    let ss: f64 = col.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Center and scale predictors and response.
///
/// Returned predictors have column mean 0 and sample standard deviation 1;
/// constant columns become all zero and are recorded. The response gets mean
/// 0 and standard deviation 1. Truth metadata is not carried over: the
/// standardized copy is an internal fitting representation.
pub fn standardize(data: &Dataset) -> Result<(Dataset, Standardization)> {
    let (n, p) = (data.n(), data.p());
    if n < 2 {
        return Err(SparError::TooFewObservations { n, required: 2 });
    }
    let (y_center, y_sd) = column_moments(data.y.view());
    if y_sd == 0.0 {
        return Err(SparError::ZeroVarianceResponse);
    }

    let mut x_center = vec![0.0; p];
    let mut x_scale = vec![1.0; p];
    let mut constant_columns = Vec::new();
    for (j, col) in data.x.axis_iter(Axis(1)).enumerate() {
        let (mean, sd) = column_moments(col);
        x_center[j] = mean;
        if sd == 0.0 {
            constant_columns.push(j);
        } else {
            x_scale[j] = sd;
        }
    }

    let std = Standardization {
        x_center,
        x_scale,
        y_center,
        y_scale: y_sd,
        constant_columns,
    };
    let (mut xs, ys) = std.apply(&data.x, &data.y);
    // A constant column standardizes to exactly zero; enforce it against
    // subtractive rounding.
    for &j in &std.constant_columns {
        xs.column_mut(j).fill(0.0);
    }
    Ok((Dataset::new(xs, ys)?, std))
}

#[derive(Serialize, Deserialize)]
struct TruthDocument {
    beta: Vec<f64>,
    mu: f64,
    sigma2: f64,
    active_set: Vec<usize>,
}

/// Path of the JSON sidecar carrying truth metadata for a CSV dataset.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    let mut os = csv_path.as_os_str().to_owned();
    os.push(".truth.json");
    PathBuf::from(os)
}

/// Write a dataset as CSV with header `x1,...,xp,y`. When truth metadata is
/// present it goes to a `<path>.truth.json` sidecar.
pub fn write_csv(data: &Dataset, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let p = data.p();
    let mut header: Vec<String> = (1..=p).map(|j| format!("x{j}")).collect();
    header.push("y".to_string());
    w.write_record(&header)?;
    for i in 0..data.n() {
        let mut rec: Vec<String> = (0..p).map(|j| data.x[[i, j]].to_string()).collect();
        rec.push(data.y[i].to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    if let Some(t) = &data.truth {
        let doc = TruthDocument {
            beta: t.beta.to_vec(),
            mu: t.mu,
            sigma2: t.sigma2,
            active_set: t.active_set.clone(),
        };
        std::fs::write(sidecar_path(path), serde_json::to_string_pretty(&doc)?)?;
    }
    Ok(())
}

/// Read a dataset written by [`write_csv`]. The `y` column is optional so
/// prediction inputs can omit it; the truth sidecar is loaded when present.
pub fn read_csv(path: &Path) -> Result<Dataset> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    let y_col = header.iter().position(|h| h == "y");
    let x_cols: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with('x'))
        .map(|(i, _)| i)
        .collect();
    if x_cols.is_empty() {
        return Err(SparError::InvalidConfig(format!(
            "{}: no x1..xp columns found",
            path.display()
        )));
    }
    let p = x_cols.len();
    let mut rows: Vec<f64> = Vec::new();
    let mut y = Vec::new();
    let parse = |field: &str| -> Result<f64> {
        field
            .parse::<f64>()
            .map_err(|e| SparError::InvalidConfig(format!("bad numeric field {field:?}: {e}")))
    };
    for rec in r.records() {
        let rec = rec?;
        for &c in &x_cols {
            rows.push(parse(&rec[c])?);
        }
        if let Some(c) = y_col {
            y.push(parse(&rec[c])?);
        }
    }
    let n = rows.len() / p;
    let x = Array2::from_shape_vec((n, p), rows)
        .map_err(|e| SparError::InvalidConfig(e.to_string()))?;
    let y = if y_col.is_some() {
        Array1::from_vec(y)
    } else {
        Array1::zeros(n)
    };
    let mut ds = Dataset::new(x, y)?;

    let sidecar = sidecar_path(path);
    if sidecar.exists() {
        let doc: TruthDocument = serde_json::from_str(&std::fs::read_to_string(sidecar)?)?;
        let truth = Truth::new(Array1::from_vec(doc.beta), doc.mu, doc.sigma2);
        if truth.beta.len() != ds.p() {
            return Err(SparError::DimensionMismatch {
                expected: ds.p(),
                found: truth.beta.len(),
            });
        }
        ds.truth = Some(truth);
    }
    Ok(ds)
}

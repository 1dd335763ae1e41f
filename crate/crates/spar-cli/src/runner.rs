//! Config-driven simulation runner: replications, method dispatch, the
//! stable CSV schema, and deterministic parallelism.
//!
//! Replications are the unit of parallelism. Every replication derives its
//! own seed from the master seed and its index, data generation consumes a
//! stream independent of the method list, and rows are buffered and written
//! in replication order, so serial and parallel runs emit identical bytes.

use std::collections::HashMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use spar_core::metrics::{mspe, selection_scores};
use spar_core::seed::{derive_seed, stable_hash};
use spar_core::{generate, rmspe, Dataset, EvalResult, Result, SparError, SparModel};

use crate::config::{ExperimentConfig, MethodSpec, SweepParameter};
use crate::methods::{fit_simple, fit_spar, spar_output, FitOutput};

/// Fixed output schema; every numeric cell is a finite float or `NA`.
pub const CSV_HEADER: [&str; 15] = [
    "method",
    "setting",
    "regime",
    "rep",
    "sweep_value",
    "rmspe",
    "mspe",
    "precision",
    "recall",
    "f1",
    "num_active",
    "chosen_m",
    "chosen_lambda",
    "runtime_s",
    "error",
];

/// One CSV row: a method evaluated on one replication.
#[derive(Debug, Clone)]
pub struct ResultRecord {
    pub method: String,
    pub setting: String,
    pub regime: String,
    pub rep: usize,
    pub sweep_value: Option<f64>,
    pub eval: Option<EvalResult>,
    pub chosen_m: Option<usize>,
    pub chosen_lambda: Option<f64>,
    pub error: Option<String>,
}

fn na_or<T: std::fmt::Display>(v: &Option<T>) -> String {
    match v {
        Some(x) => x.to_string(),
        None => "NA".to_string(),
    }
}

impl ResultRecord {
    pub fn to_fields(&self) -> Vec<String> {
        let (rmspe, mspe, precision, recall, f1, num_active, runtime) = match &self.eval {
            Some(e) => (
                e.rmspe.to_string(),
                e.mspe.to_string(),
                e.precision.to_string(),
                e.recall.to_string(),
                e.f1.to_string(),
                e.num_active.to_string(),
                na_or(&e.runtime_seconds),
            ),
            None => (
                "NA".into(),
                "NA".into(),
                "NA".into(),
                "NA".into(),
                "NA".into(),
                "NA".into(),
                "NA".into(),
            ),
        };
        vec![
            self.method.clone(),
            self.setting.clone(),
            self.regime.clone(),
            self.rep.to_string(),
            na_or(&self.sweep_value),
            rmspe,
            mspe,
            precision,
            recall,
            f1,
            num_active,
            na_or(&self.chosen_m),
            na_or(&self.chosen_lambda),
            runtime,
            self.error.clone().unwrap_or_default(),
        ]
    }
}

fn record_skeleton(config: &ExperimentConfig, spec: &MethodSpec, rep: usize) -> ResultRecord {
    ResultRecord {
        method: spec.label(),
        setting: config.setting.label().to_string(),
        regime: config.regime.label().to_string(),
        rep,
        sweep_value: None,
        eval: None,
        chosen_m: None,
        chosen_lambda: None,
        error: None,
    }
}

fn evaluate(
    fit: &FitOutput,
    train: &Dataset,
    test: &Dataset,
    runtime_seconds: Option<f64>,
) -> Result<EvalResult> {
    let pred = fit.predict(&test.x);
    let y_bar = train.y.sum() / train.n() as f64;
    let truth = test.truth.as_ref().expect("simulated datasets carry truth");
    let sel = selection_scores(&fit.coefficients, &truth.beta);
    Ok(EvalResult {
        rmspe: rmspe(&pred, &test.y, y_bar)?,
        mspe: mspe(&pred, &test.y),
        precision: sel.precision,
        recall: sel.recall,
        f1: sel.f1,
        num_active: sel.num_active,
        runtime_seconds,
    })
}

/// Run one replication: generate data from the replication seed and fit
/// every method. Failures become rows with the error column set.
fn run_replication(config: &ExperimentConfig, rep: usize) -> Vec<ResultRecord> {
    let rep_seed = derive_seed(config.seed, rep as u64);
    let coef = match config
        .regime
        .to_coefficients(&config.setting, config.n, config.p)
    {
        Ok(c) => c,
        Err(e) => return error_rows(config, rep, &e.to_string()),
    };
    let cov = config.setting.to_covariance(config.p, coef.a);
    let (train, test) = match generate(
        &cov,
        &coef,
        config.n,
        config.n_test,
        config.rho_snr,
        config.mu,
        rep_seed,
    ) {
        Ok(pair) => pair,
        Err(e) => return error_rows(config, rep, &e.to_string()),
    };

    // SPAR fits are shared across selection rules (same RNG identity) when
    // timing is off; with timing on, each entry pays its own fit so the
    // reported time is honest.
    let mut spar_cache: HashMap<String, std::result::Result<SparModel, String>> = HashMap::new();

    config
        .methods
        .iter()
        .map(|spec| {
            let mut record = record_skeleton(config, spec, rep);
            let method_seed = derive_seed(rep_seed, stable_hash(spec.rng_identity().as_bytes()));
            let started = Instant::now();
            let fit: std::result::Result<FitOutput, String> = match spec {
                MethodSpec::Spar { .. } => {
                    let shared = if config.timing {
                        fit_spar(spec, &train, method_seed).map_err(|e| e.to_string())
                    } else {
                        spar_cache
                            .entry(spec.rng_identity())
                            .or_insert_with(|| {
                                fit_spar(spec, &train, method_seed).map_err(|e| e.to_string())
                            })
                            .clone()
                    };
                    shared.map(|model| spar_output(spec, &model))
                }
                other => fit_simple(other, &train, method_seed).map_err(|e| e.to_string()),
            };
            match fit {
                Ok(fit) => {
                    let runtime = config.timing.then(|| started.elapsed().as_secs_f64());
                    record.chosen_m = fit.chosen_m;
                    record.chosen_lambda = fit.chosen_lambda;
                    match evaluate(&fit, &train, &test, runtime) {
                        Ok(eval) => record.eval = Some(eval),
                        Err(e) => record.error = Some(e.to_string()),
                    }
                }
                Err(e) => record.error = Some(e),
            }
            record
        })
        .collect()
}

fn error_rows(config: &ExperimentConfig, rep: usize, message: &str) -> Vec<ResultRecord> {
    config
        .methods
        .iter()
        .map(|spec| {
            let mut r = record_skeleton(config, spec, rep);
            r.error = Some(message.to_string());
            r
        })
        .collect()
}

/// All records of a simulation run, in (replication, method) order.
pub fn simulation_records(config: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    config.validate()?;
    let per_rep: Vec<Vec<ResultRecord>> = if config.parallelism > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.parallelism)
            .build()
            .map_err(|e| SparError::InvalidConfig(e.to_string()))?;
        pool.install(|| {
            (0..config.reps)
                .into_par_iter()
                .map(|rep| run_replication(config, rep))
                .collect()
        })
    } else {
        (0..config.reps)
            .map(|rep| run_replication(config, rep))
            .collect()
    };
    Ok(per_rep.into_iter().flatten().collect())
}

/// Write header plus records as CSV.
pub fn write_records<W: Write>(records: &[ResultRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.to_fields())?;
    }
    w.flush()?;
    Ok(())
}

/// The `simulate` entry point: run the config and emit CSV.
pub fn run_simulation<W: Write>(config: &ExperimentConfig, out: W) -> Result<()> {
    let records = simulation_records(config)?;
    write_records(&records, out)
}

/// Vary one parameter over a grid, rerunning the whole simulation per grid
/// point; rows carry the grid value in `sweep_value`.
pub fn sweep<W: Write>(
    parameter: SweepParameter,
    grid: &[f64],
    base: &ExperimentConfig,
    out: W,
) -> Result<()> {
    if grid.is_empty() {
        return Err(SparError::InvalidConfig("sweep grid is empty".into()));
    }
    let mut all = Vec::new();
    for &value in grid {
        let config = apply_sweep(parameter, value, base)?;
        let mut records = simulation_records(&config)?;
        for r in &mut records {
            r.sweep_value = Some(value);
        }
        all.extend(records);
    }
    write_records(&all, out)
}

fn positive_integer(value: f64, what: &str) -> Result<usize> {
    if value.fract() != 0.0 || value < 1.0 {
        return Err(SparError::InvalidConfig(format!(
            "{what} grid values must be positive integers, got {value}"
        )));
    }
    Ok(value as usize)
}

fn apply_sweep(
    parameter: SweepParameter,
    value: f64,
    base: &ExperimentConfig,
) -> Result<ExperimentConfig> {
    let mut config = base.clone();
    match parameter {
        SweepParameter::NumModels => {
            let m = positive_integer(value, "num-models")?;
            for spec in &mut config.methods {
                if let MethodSpec::Spar {
                    max_models,
                    cv_over_m,
                    ..
                } = spec
                {
                    *max_models = Some(m);
                    *cv_over_m = Some(false);
                }
            }
        }
        SweepParameter::ScreenFactor => {
            for spec in &mut config.methods {
                match spec {
                    MethodSpec::Spar { screen_factor, .. } => *screen_factor = Some(value),
                    MethodSpec::HolpScreenOnly { c } => *c = value,
                    _ => {}
                }
            }
        }
        SweepParameter::SampleSize => config.n = positive_integer(value, "sample-size")?,
        SweepParameter::Dimension => config.p = positive_integer(value, "dimension")?,
        SweepParameter::Snr => {
            if value <= 0.0 || value.is_nan() {
                return Err(SparError::InvalidConfig(
                    "snr grid values must be positive".into(),
                ));
            }
            config.rho_snr = value;
        }
    }
    config.validate()?;
    Ok(config)
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spar_cli::checks::{check_lemma_moments, check_theorem1};
use spar_cli::config::{ExperimentConfig, RegimeSpec, SettingSpec, SweepParameter};
use spar_cli::runner::{run_simulation, sweep};
use spar_core::dataset::{read_csv, write_csv};
use spar_core::estimator::SelectionRule;
use spar_core::{cross_validate, ModelDocument, SparConfig, SparError};

#[derive(Parser)]
#[command(
    name = "spar",
    version,
    about = "Benchmark harness for Sparse Projected Averaged Regression"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config-driven simulation benchmark and emit the result CSV.
    Simulate {
        /// Experiment config file (.toml or .json).
        #[arg(long)]
        config: PathBuf,
        /// Override the master seed of the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the number of replications.
        #[arg(long)]
        reps: Option<usize>,
        /// Output CSV path (defaults to the config's `output`, else stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the worker count.
        #[arg(long)]
        jobs: Option<usize>,
        /// Measure wall-clock fit+predict time per method. Timing makes the
        /// runtime_s column non-reproducible across runs.
        #[arg(long)]
        timing: bool,
    },
    /// Rerun a simulation over a one-parameter grid; rows gain sweep_value.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        parameter: SweepParameter,
        /// Comma-separated grid values, e.g. --grid 1,5,20,50.
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Monte Carlo check of the prediction-gain bound for data-informed CW
    /// projections on the compound-symmetry testbed.
    CheckTheorem1 {
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, default_value_t = 500)]
        p: usize,
        #[arg(long, default_value_t = 20)]
        m: usize,
        #[arg(long, default_value_t = 25)]
        a: usize,
        #[arg(long, default_value_t = 200)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Compare the closed-form preimage-moment identities against exact
    /// enumeration and report approximation decay orders.
    CheckLemmas {
        #[arg(long, default_value_t = 12)]
        p_max: usize,
        #[arg(long, default_value_t = 12)]
        m_max: usize,
    },
    /// Fit SPAR on a CSV dataset (columns x1..xp and y) and write the model
    /// as JSON.
    SparFit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        max_models: usize,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        #[arg(long, default_value_t = 2.0)]
        screen_factor: f64,
        #[arg(long, value_enum, default_value_t = RuleArg::Best)]
        rule: RuleArg,
    },
    /// Predict with a saved model JSON on a CSV of predictors.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Output CSV with a single y_hat column (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic dataset and write it as CSV (+ truth sidecar).
    Generate {
        #[arg(long, value_enum)]
        setting: SettingArg,
        #[arg(long, value_enum)]
        regime: RegimeArg,
        /// Active count, required for regime example-one.
        #[arg(long)]
        a: Option<usize>,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        p: usize,
        #[arg(long, default_value_t = 100)]
        n_test: usize,
        #[arg(long, default_value_t = 10.0)]
        rho_snr: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Training CSV path; the test split goes to <out>.test.csv.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum RuleArg {
    Best,
    OneSe,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SettingArg {
    Independent,
    CompoundSymmetry,
    Autoregressive,
    GroupBlock,
    Factor,
    ExtremeCorrelation,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum RegimeArg {
    Sparse,
    Medium,
    Dense,
    ExampleOne,
}

enum AppError {
    Config(String),
    Internal(String),
}

impl From<SparError> for AppError {
    fn from(e: SparError) -> Self {
        match e {
            SparError::InvalidConfig(_)
            | SparError::UnsupportedModelVersion(_)
            | SparError::FoldTooSmall { .. } => AppError::Config(e.to_string()),
            other => AppError::Internal(other.to_string()),
        }
    }
}

fn load_config(
    path: &std::path::Path,
    seed: Option<u64>,
    reps: Option<usize>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    timing: bool,
) -> Result<ExperimentConfig, AppError> {
    let mut cfg = ExperimentConfig::from_file(path).map_err(|e| AppError::Config(e.to_string()))?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(r) = reps {
        cfg.reps = r;
    }
    if let Some(o) = out {
        cfg.output = Some(o);
    }
    if let Some(j) = jobs {
        cfg.parallelism = j;
    }
    if timing {
        cfg.timing = true;
    }
    cfg.validate()
        .map_err(|e| AppError::Config(e.to_string()))?;
    Ok(cfg)
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, AppError> {
    match path {
        Some(p) => Ok(Box::new(
            std::fs::File::create(p).map_err(|e| AppError::Internal(e.to_string()))?,
        )),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Simulate {
            config,
            seed,
            reps,
            out,
            jobs,
            timing,
        } => {
            let cfg = load_config(&config, seed, reps, out, jobs, timing)?;
            let writer = open_output(&cfg.output)?;
            run_simulation(&cfg, writer)?;
            Ok(())
        }
        Command::Sweep {
            config,
            parameter,
            grid,
            seed,
            reps,
            out,
            jobs,
        } => {
            let cfg = load_config(&config, seed, reps, out, jobs, false)?;
            let writer = open_output(&cfg.output)?;
            sweep(parameter, &grid, &cfg, writer)?;
            Ok(())
        }
        Command::CheckTheorem1 {
            n,
            p,
            m,
            a,
            reps,
            seed,
        } => {
            let report = check_theorem1(n, p, m, a, reps, seed)?;
            print!("{report}");
            Ok(())
        }
        Command::CheckLemmas { p_max, m_max } => {
            let report = check_lemma_moments(p_max, m_max)?;
            print!("{report}");
            Ok(())
        }
        Command::SparFit {
            data,
            out,
            seed,
            max_models,
            folds,
            screen_factor,
            rule,
        } => {
            let dataset = read_csv(&data)?;
            let cfg = SparConfig {
                max_models,
                folds,
                screen_factor,
                seed,
                rule: match rule {
                    RuleArg::Best => SelectionRule::Best,
                    RuleArg::OneSe => SelectionRule::OneSe,
                },
                ..SparConfig::default()
            };
            let model = cross_validate(&dataset, &cfg)?;
            model.document().save_json(&out)?;
            let active = model
                .coefficients_orig
                .iter()
                .filter(|v| **v != 0.0)
                .count();
            println!(
                "fitted M = {}, lambda = {:.6}, {} active of {} predictors -> {}",
                model.chosen_m,
                model.chosen_lambda,
                active,
                dataset.p(),
                out.display()
            );
            Ok(())
        }
        Command::Predict { model, data, out } => {
            let doc = ModelDocument::load_json(&model)?;
            let dataset = read_csv(&data)?;
            let pred = doc.predict(&dataset.x)?;
            let mut w = csv::Writer::from_writer(open_output(&out)?);
            w.write_record(["y_hat"])
                .and_then(|()| {
                    pred.iter()
                        .try_for_each(|v| w.write_record([v.to_string()]))
                })
                .map_err(|e| AppError::Internal(e.to_string()))?;
            w.flush().map_err(|e| AppError::Internal(e.to_string()))?;
            Ok(())
        }
        Command::Generate {
            setting,
            regime,
            a,
            n,
            p,
            n_test,
            rho_snr,
            mu,
            seed,
            out,
        } => {
            let setting = match setting {
                SettingArg::Independent => SettingSpec::Independent,
                SettingArg::CompoundSymmetry => SettingSpec::CompoundSymmetry { rho: 0.5 },
                SettingArg::Autoregressive => SettingSpec::Autoregressive { rho: 0.9 },
                SettingArg::GroupBlock => SettingSpec::GroupBlock { block_size: 100 },
                SettingArg::Factor => SettingSpec::Factor { k: None },
                SettingArg::ExtremeCorrelation => SettingSpec::ExtremeCorrelation,
            };
            let regime = match regime {
                RegimeArg::Sparse => RegimeSpec::Sparse,
                RegimeArg::Medium => RegimeSpec::Medium,
                RegimeArg::Dense => RegimeSpec::Dense,
                RegimeArg::ExampleOne => RegimeSpec::ExampleOne {
                    a: a.ok_or_else(|| {
                        AppError::Config("--a is required for regime example-one".into())
                    })?,
                },
            };
            let coef = regime
                .to_coefficients(&setting, n, p)
                .map_err(AppError::from)?;
            let cov = setting.to_covariance(p, coef.a);
            let (train, test) = spar_core::generate(&cov, &coef, n, n_test, rho_snr, mu, seed)?;
            write_csv(&train, &out)?;
            let mut test_path = out.as_os_str().to_owned();
            test_path.push(".test.csv");
            write_csv(&test, &PathBuf::from(test_path))?;
            println!(
                "wrote {} ({} rows) and test split ({} rows), a = {}",
                out.display(),
                n,
                n_test,
                coef.a
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{e}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

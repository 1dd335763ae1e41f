//! Experiment configuration: the JSON/TOML schema driving `simulate` and
//! `sweep`, and its resolution into core simulation types.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spar_core::estimator::SelectionRule;
use spar_core::simgen::{
    derived_active_count, CoefficientRegime, CoefficientSpec, CovKind, CovarianceSpec,
};
use spar_core::{SparConfig, SparError};

fn default_n() -> usize {
    100
}
fn default_p() -> usize {
    1000
}
fn default_n_test() -> usize {
    100
}
fn default_rho_snr() -> f64 {
    10.0
}
fn default_mu() -> f64 {
    1.0
}
fn default_reps() -> usize {
    30
}
fn default_parallelism() -> usize {
    1
}
fn default_cs_rho() -> f64 {
    0.5
}
fn default_ar_rho() -> f64 {
    0.9
}
fn default_block_size() -> usize {
    100
}
fn default_screen_c() -> f64 {
    2.0
}

/// Covariance setting names mirroring the six simulation structures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SettingSpec {
    Independent,
    CompoundSymmetry {
        #[serde(default = "default_cs_rho")]
        rho: f64,
    },
    Autoregressive {
        #[serde(default = "default_ar_rho")]
        rho: f64,
    },
    GroupBlock {
        #[serde(default = "default_block_size")]
        block_size: usize,
    },
    /// k defaults to the active count of the regime.
    Factor {
        #[serde(default)]
        k: Option<usize>,
    },
    ExtremeCorrelation,
}

impl SettingSpec {
    pub fn label(&self) -> &'static str {
        match self {
            SettingSpec::Independent => "independent",
            SettingSpec::CompoundSymmetry { .. } => "compound_symmetry",
            SettingSpec::Autoregressive { .. } => "autoregressive",
            SettingSpec::GroupBlock { .. } => "group",
            SettingSpec::Factor { .. } => "factor",
            SettingSpec::ExtremeCorrelation => "extreme",
        }
    }

    /// Resolve to a covariance spec given the dimension and active count.
    pub fn to_covariance(&self, p: usize, a: usize) -> CovarianceSpec {
        let kind = match self {
            SettingSpec::Independent => CovKind::Independent,
            SettingSpec::CompoundSymmetry { rho } => CovKind::CompoundSymmetry { rho: *rho },
            SettingSpec::Autoregressive { rho } => CovKind::Autoregressive { rho: *rho },
            SettingSpec::GroupBlock { block_size } => CovKind::GroupBlock {
                block_size: *block_size,
            },
            SettingSpec::Factor { k } => CovKind::Factor { k: k.unwrap_or(a) },
            SettingSpec::ExtremeCorrelation => CovKind::ExtremeCorrelation { a },
        };
        CovarianceSpec::new(kind, p)
    }
}

/// Sparsity level of the true coefficients. Under the extreme-correlation
/// setting the ladder scheme replaces the Fan-Lv magnitudes, keeping the
/// active count of the named level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeSpec {
    Sparse,
    Medium,
    Dense,
    ExampleOne { a: usize },
}

impl RegimeSpec {
    pub fn label(&self) -> &'static str {
        match self {
            RegimeSpec::Sparse => "sparse",
            RegimeSpec::Medium => "medium",
            RegimeSpec::Dense => "dense",
            RegimeSpec::ExampleOne { .. } => "example_one",
        }
    }

    pub fn to_coefficients(
        &self,
        setting: &SettingSpec,
        n: usize,
        p: usize,
    ) -> Result<CoefficientSpec, SparError> {
        let base = match self {
            RegimeSpec::Sparse => CoefficientRegime::Sparse,
            RegimeSpec::Medium => CoefficientRegime::Medium,
            RegimeSpec::Dense => CoefficientRegime::Dense,
            RegimeSpec::ExampleOne { a } => {
                if *a < 1 || *a > p {
                    return Err(SparError::InvalidConfig(format!(
                        "example_one active count {a} must lie in 1..=p"
                    )));
                }
                return Ok(CoefficientSpec::with_active_count(
                    CoefficientRegime::ExampleOne,
                    *a,
                ));
            }
        };
        let a = derived_active_count(base, n, p).expect("level regimes derive a");
        if matches!(setting, SettingSpec::ExtremeCorrelation) {
            Ok(CoefficientSpec::with_active_count(
                CoefficientRegime::ExtremeLadder,
                a,
            ))
        } else {
            Ok(CoefficientSpec::with_active_count(base, a))
        }
    }
}

/// Selection rule names in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RuleSpec {
    #[default]
    Best,
    OneSe,
}

impl From<RuleSpec> for SelectionRule {
    fn from(r: RuleSpec) -> Self {
        match r {
            RuleSpec::Best => SelectionRule::Best,
            RuleSpec::OneSe => SelectionRule::OneSe,
        }
    }
}

/// Diagonal policy for the single-projection comparison method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CwDiagonalSpec {
    RandomSign,
    HolpValues,
    HolpSigns,
    OracleBeta,
    OracleSigns,
}

impl CwDiagonalSpec {
    pub fn label(&self) -> &'static str {
        match self {
            CwDiagonalSpec::RandomSign => "random_sign",
            CwDiagonalSpec::HolpValues => "holp_values",
            CwDiagonalSpec::HolpSigns => "holp_signs",
            CwDiagonalSpec::OracleBeta => "oracle_beta",
            CwDiagonalSpec::OracleSigns => "oracle_signs",
        }
    }
}

/// One benchmark method entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodSpec {
    Holp,
    HolpScreenOnly {
        #[serde(default = "default_screen_c")]
        c: f64,
    },
    SisScreenOnly,
    Spar {
        #[serde(default)]
        rule: RuleSpec,
        #[serde(default)]
        max_models: Option<usize>,
        #[serde(default)]
        screen_factor: Option<f64>,
        #[serde(default)]
        folds: Option<usize>,
        #[serde(default)]
        cv_over_m: Option<bool>,
    },
    CwProjectionVariant {
        diagonal: CwDiagonalSpec,
        m: usize,
    },
}

fn trim_float(v: f64) -> String {
    let s = format!("{v}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

impl MethodSpec {
    /// CSV label, unique per method entry.
    pub fn label(&self) -> String {
        match self {
            MethodSpec::Holp => "holp".into(),
            MethodSpec::HolpScreenOnly { c } => format!("holp_screen_c{}", trim_float(*c)),
            MethodSpec::SisScreenOnly => "sis_screen".into(),
            MethodSpec::Spar { rule, .. } => match rule {
                RuleSpec::Best => "spar_best".into(),
                RuleSpec::OneSe => "spar_1se".into(),
            },
            MethodSpec::CwProjectionVariant { diagonal, m } => {
                format!("cw_{}_m{m}", diagonal.label())
            }
        }
    }

    /// Identity used to derive the method's RNG stream. Rule-independent for
    /// SPAR so best and 1-se read off one cross-validation fit.
    pub fn rng_identity(&self) -> String {
        match self {
            MethodSpec::Spar {
                max_models,
                screen_factor,
                folds,
                cv_over_m,
                ..
            } => format!(
                "spar[m={max_models:?},c={screen_factor:?},folds={folds:?},cvm={cv_over_m:?}]"
            ),
            other => other.label(),
        }
    }

    /// SPAR hyperparameters implied by this entry.
    pub fn spar_config(&self, seed: u64) -> Option<SparConfig> {
        if let MethodSpec::Spar {
            rule,
            max_models,
            screen_factor,
            folds,
            cv_over_m,
        } = self
        {
            let mut cfg = SparConfig {
                seed,
                rule: (*rule).into(),
                ..SparConfig::default()
            };
            if let Some(m) = max_models {
                cfg.max_models = *m;
            }
            if let Some(c) = screen_factor {
                cfg.screen_factor = *c;
            }
            if let Some(f) = folds {
                cfg.folds = *f;
            }
            if let Some(b) = cv_over_m {
                cfg.cv_over_m = *b;
            }
            Some(cfg)
        } else {
            None
        }
    }
}

/// Which experiment parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepParameter {
    /// Ensemble size of the SPAR methods (CV then only tunes lambda).
    NumModels,
    /// Screening factor c for SPAR and screen-only methods.
    ScreenFactor,
    /// Training sample size n.
    SampleSize,
    /// Number of predictors p.
    Dimension,
    /// Signal-to-noise ratio.
    Snr,
}

/// A full benchmark description. Field names are the config-file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub setting: SettingSpec,
    pub regime: RegimeSpec,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_p")]
    pub p: usize,
    #[serde(default = "default_n_test")]
    pub n_test: usize,
    #[serde(default = "default_rho_snr")]
    pub rho_snr: f64,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    pub methods: Vec<MethodSpec>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    /// Wall-clock timing per method; off by default so repeated runs are
    /// byte-identical.
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), SparError> {
        if self.reps < 1 {
            return Err(SparError::InvalidConfig("reps must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(SparError::InvalidConfig("methods must be nonempty".into()));
        }
        if self.n < 4 || self.p < 2 || self.n_test < 2 {
            return Err(SparError::InvalidConfig(
                "need n >= 4, p >= 2, n_test >= 2".into(),
            ));
        }
        if self.rho_snr <= 0.0 || self.rho_snr.is_nan() {
            return Err(SparError::InvalidConfig("rho_snr must be positive".into()));
        }
        if self.parallelism < 1 {
            return Err(SparError::InvalidConfig("parallelism must be >= 1".into()));
        }
        self.regime
            .to_coefficients(&self.setting, self.n, self.p)
            .map(|_| ())
    }

    /// Parse a JSON or TOML config file, deciding by extension.
    pub fn from_file(path: &Path) -> Result<Self, SparError> {
        let text = std::fs::read_to_string(path)?;
        let is_json = path
            .extension()
            .map(|e| e.eq_ignore_ascii_case("json"))
            .unwrap_or(false);
        let cfg: ExperimentConfig = if is_json {
            serde_json::from_str(&text)?
        } else {
            toml::from_str(&text)
                .map_err(|e| SparError::InvalidConfig(format!("{}: {e}", path.display())))?
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

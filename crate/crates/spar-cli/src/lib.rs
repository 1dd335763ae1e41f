//! Benchmark harness for the SPAR estimator: config-driven simulation runs,
//! parameter sweeps, closed-form theory checks and CSV emission.

pub mod checks;
pub mod config;
pub mod methods;
pub mod oracles;
pub mod runner;

pub use config::{ExperimentConfig, MethodSpec, RegimeSpec, SettingSpec, SweepParameter};
pub use runner::{run_simulation, simulation_records, sweep, ResultRecord, CSV_HEADER};

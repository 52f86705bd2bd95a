//! Experiment harness: configs, parallel trial execution, result files,
//! exponent fits and directory audits.

pub mod audit;
pub mod config;
pub mod fit;
pub mod output;
pub mod runner;

use std::path::Path;

pub use audit::{audit_directory, DirectoryAudit, TrialAudit};
pub use config::{ExperimentConfig, PolicyEntry, RawConfig};
pub use fit::{fit_exponent, final_points, read_curves, CurveRow, ExponentFit};
pub use output::{write_outputs, ExperimentReport, GroupStats};
pub use runner::{run_trial, run_trials, trial_keys, TrialKey, TrialOutcome, REPLAY_TOLERANCE};

use crate::error::Result;

/// Runs every trial of `config` without touching the filesystem.
pub fn simulate(config: &ExperimentConfig, parallel: Option<usize>) -> Result<ExperimentReport> {
    let results = run_trials(config, &trial_keys(config), parallel)?;
    Ok(ExperimentReport::from_results(config, results))
}

/// Runs every trial and writes the result files into `out`.
pub fn run_experiment(config: &ExperimentConfig, out: &Path, parallel: Option<usize>) -> Result<ExperimentReport> {
    let report = simulate(config, parallel)?;
    write_outputs(config, &report, out)?;
    Ok(report)
}

//! Command-line front end for the rotting-bandit benchmark harness.
//!
//! Exit codes: 0 success, 1 configuration or I/O error (or a trial that
//! errored), 2 a budget or ledger audit failed.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rotbandit::harness::{self, ExperimentConfig};
use rotbandit::Error;

#[derive(Parser)]
#[command(name = "rotbandit", version, about = "Rested rotting bandit simulator and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (policy, horizon, seed) trial of a config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config's `output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the number of seeds.
        #[arg(long)]
        seeds: Option<u64>,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// Re-simulate an output directory and check every stored file.
    Audit {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Fit the log-log regret exponent of one policy from curves.csv.
    Fit {
        #[arg(long)]
        curves: PathBuf,
        #[arg(long)]
        policy: String,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run {
            config,
            out,
            seeds,
            parallel,
        } => {
            let cfg = ExperimentConfig::load(&config)?.with_overrides(out, seeds)?;
            let dir = cfg.output_dir.clone();
            let report = harness::run_experiment(&cfg, &dir, parallel)?;
            println!("{:<16} {:>10} {:>6} {:>14} {:>12}", "policy", "T", "seeds", "mean_regret", "std");
            for g in &report.groups {
                println!(
                    "{:<16} {:>10} {:>6} {:>14.2} {:>12.2}",
                    g.policy,
                    g.horizon,
                    g.n_seeds,
                    g.final_mean(),
                    g.final_std()
                );
            }
            for (p, f) in &report.exponents {
                println!("exponent {p}: slope {:.4} (r2 {:.4})", f.slope, f.r2);
            }
            println!("results written to {}", dir.display());
            for (k, e) in &report.failures {
                eprintln!("trial {} failed: {e}", k.stem());
            }
            if !report.audits_pass() {
                for o in report.outcomes.iter().filter(|o| !o.pass()) {
                    eprintln!("audit failed for {}", o.key.stem());
                }
                return Ok(ExitCode::from(2));
            }
            Ok(if report.is_complete() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Audit { dir } => {
            let report = harness::audit_directory(&dir)?;
            let mut failed = 0usize;
            for (key, check) in report.failing() {
                failed += 1;
                eprintln!(
                    "FAIL {} {}: measured {} limit {}",
                    key.stem(),
                    check.name,
                    check.measured,
                    check.limit
                );
            }
            println!("audited {} trial(s), {} failing check(s)", report.trials.len(), failed);
            Ok(if report.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Fit { curves, policy } => {
            let file = File::open(&curves).map_err(|e| Error::Io {
                path: curves.clone(),
                source: e,
            })?;
            let rows = harness::read_curves(BufReader::new(file), &curves)?;
            let points = harness::final_points(&rows, &policy);
            let fit = harness::fit_exponent(&points)?;
            println!(
                "policy={policy} slope={:.6} intercept={:.6} r2={:.6} rss={:.3e} points={}",
                fit.slope, fit.intercept, fit.r2, fit.rss, fit.n_points
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

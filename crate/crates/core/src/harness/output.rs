//! Aggregation and result files.
//!
//! Layout of an output directory:
//!
//! ```text
//! config.toml                   effective config (re-runnable)
//! traces/<label>_T<T>_seed<i>.csv
//! events/<label>_T<T>_seed<i>.rot   when event_logs = true
//! summary.csv                   policy,T,seed,final_regret
//! curves.csv                    policy,T,t,mean_regret,std_regret
//! exponents.csv                 policy,slope,intercept,r2,n_points (>= 3 horizons)
//! audit.csv                     policy,T,seed,check,pass,measured,limit
//! diagnostics.csv               policy,T,seed,arms_sampled,clip_warnings,payoff_clamps
//! failures.csv, INCOMPLETE      only when some trial errored
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::adversary::write_events;
use crate::env::RegretTrace;
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::fit::{fit_exponent, ExponentFit, CURVES_HEADER};
use crate::harness::runner::{TrialKey, TrialOutcome, REPLAY_TOLERANCE};

/// Seed-aggregated curve of one (policy, horizon) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub policy: String,
    pub horizon: u64,
    pub n_seeds: usize,
    /// `(t, mean, unbiased std)` at every checkpoint.
    pub curve: Vec<(u64, f64, f64)>,
}

impl GroupStats {
    pub fn final_mean(&self) -> f64 {
        self.curve.last().map_or(f64::NAN, |c| c.1)
    }

    pub fn final_std(&self) -> f64 {
        self.curve.last().map_or(f64::NAN, |c| c.2)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub outcomes: Vec<TrialOutcome>,
    pub failures: Vec<(TrialKey, String)>,
    pub groups: Vec<GroupStats>,
    pub exponents: Vec<(String, ExponentFit)>,
}

impl ExperimentReport {
    pub fn from_results(config: &ExperimentConfig, results: Vec<(TrialKey, Result<TrialOutcome>)>) -> Self {
        let mut outcomes = Vec::new();
        let mut failures = Vec::new();
        for (key, r) in results {
            match r {
                Ok(o) => outcomes.push(o),
                Err(e) => failures.push((key, e.to_string())),
            }
        }
        let mut groups = Vec::new();
        for entry in &config.policies {
            for &horizon in &config.horizons {
                let traces: Vec<&RegretTrace> = outcomes
                    .iter()
                    .filter(|o| o.key.policy == entry.label && o.key.horizon == horizon)
                    .map(|o| &o.trace)
                    .collect();
                if traces.is_empty() {
                    continue;
                }
                groups.push(GroupStats {
                    policy: entry.label.clone(),
                    horizon,
                    n_seeds: traces.len(),
                    curve: aggregate(&traces),
                });
            }
        }
        let mut exponents = Vec::new();
        if config.horizons.len() >= 3 {
            for entry in &config.policies {
                let pts: Vec<(f64, f64)> = groups
                    .iter()
                    .filter(|g| g.policy == entry.label)
                    .map(|g| (g.horizon as f64, g.final_mean()))
                    .collect();
                if let Ok(fit) = fit_exponent(&pts) {
                    exponents.push((entry.label.clone(), fit));
                }
            }
        }
        ExperimentReport {
            outcomes,
            failures,
            groups,
            exponents,
        }
    }

    pub fn group(&self, policy: &str, horizon: u64) -> Option<&GroupStats> {
        self.groups
            .iter()
            .find(|g| g.policy == policy && g.horizon == horizon)
    }

    pub fn exponent(&self, policy: &str) -> Option<&ExponentFit> {
        self.exponents.iter().find(|e| e.0 == policy).map(|e| &e.1)
    }

    pub fn audits_pass(&self) -> bool {
        self.outcomes.iter().all(TrialOutcome::pass)
    }

    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

fn aggregate(traces: &[&RegretTrace]) -> Vec<(u64, f64, f64)> {
    let n = traces.len();
    let points = traces.iter().map(|t| t.checkpoints.len()).min().unwrap_or(0);
    (0..points)
        .map(|k| {
            let t = traces[0].checkpoints[k].0;
            let xs: Vec<f64> = traces.iter().map(|tr| tr.checkpoints[k].1).collect();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let std = if n > 1 {
                (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            (t, mean, std)
        })
        .collect()
}

pub fn trace_text(trace: &RegretTrace) -> String {
    let mut buf = Vec::new();
    trace.write(&mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("trace text is ASCII")
}

pub fn events_text(events: &[crate::adversary::RotEvent]) -> String {
    let mut buf = Vec::new();
    write_events(&mut buf, events).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("event text is ASCII")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

pub fn write_outputs(config: &ExperimentConfig, report: &ExperimentReport, dir: &Path) -> Result<()> {
    create_dir(&dir.join("traces"))?;
    if config.event_logs {
        create_dir(&dir.join("events"))?;
    }
    write_file(&dir.join("config.toml"), &config.to_toml_string())?;

    let mut summary = String::from("policy,T,seed,final_regret\n");
    let mut audit = String::from("policy,T,seed,check,pass,measured,limit\n");
    let mut diag = String::from("policy,T,seed,arms_sampled,clip_warnings,payoff_clamps\n");
    for o in &report.outcomes {
        let k = &o.key;
        let stem = k.stem();
        write_file(&dir.join("traces").join(format!("{stem}.csv")), &trace_text(&o.trace))?;
        if config.event_logs {
            write_file(&dir.join("events").join(format!("{stem}.rot")), &events_text(&o.events))?;
        }
        let _ = writeln!(summary, "{},{},{},{:?}", k.policy, k.horizon, k.seed_index, o.trace.final_regret());
        for c in &o.audit.checks {
            let _ = writeln!(
                audit,
                "{},{},{},{},{},{:?},{:?}",
                k.policy, k.horizon, k.seed_index, c.name, c.pass, c.measured, c.limit
            );
        }
        let _ = writeln!(
            audit,
            "{},{},{},ledger_replay,{},{:?},{:?}",
            k.policy,
            k.horizon,
            k.seed_index,
            o.replay_deviation <= REPLAY_TOLERANCE,
            o.replay_deviation,
            REPLAY_TOLERANCE
        );
        let clamps = o.payoff_clamps.map_or(String::new(), |c| c.to_string());
        let _ = writeln!(
            diag,
            "{},{},{},{},{},{}",
            k.policy, k.horizon, k.seed_index, o.arms_sampled, o.clip_warnings, clamps
        );
    }
    write_file(&dir.join("summary.csv"), &summary)?;
    write_file(&dir.join("audit.csv"), &audit)?;
    write_file(&dir.join("diagnostics.csv"), &diag)?;

    let mut curves = format!("{CURVES_HEADER}\n");
    for g in &report.groups {
        for &(t, m, s) in &g.curve {
            let _ = writeln!(curves, "{},{},{},{:?},{:?}", g.policy, g.horizon, t, m, s);
        }
    }
    write_file(&dir.join("curves.csv"), &curves)?;

    if config.horizons.len() >= 3 {
        let mut ex = String::from("policy,slope,intercept,r2,n_points\n");
        for (p, f) in &report.exponents {
            let _ = writeln!(ex, "{},{:?},{:?},{:?},{}", p, f.slope, f.intercept, f.r2, f.n_points);
        }
        write_file(&dir.join("exponents.csv"), &ex)?;
    }

    let incomplete = dir.join("INCOMPLETE");
    let failures = dir.join("failures.csv");
    if report.failures.is_empty() {
        for p in [&incomplete, &failures] {
            if p.exists() {
                fs::remove_file(p).map_err(|e| Error::io(p, e))?;
            }
        }
    } else {
        let mut text = String::from("policy,T,seed,error\n");
        for (k, e) in &report.failures {
            let e = e.replace(['\n', ','], " ");
            let _ = writeln!(text, "{},{},{},{}", k.policy, k.horizon, k.seed_index, e);
        }
        write_file(&failures, &text)?;
        write_file(&incomplete, &format!("{} trial(s) failed\n", report.failures.len()))?;
    }
    Ok(())
}

//! Re-verification of a finished output directory.
//!
//! Every trial is re-simulated from the saved config. The stored trace must
//! match the regenerated one byte for byte and the hidden-ledger replay; an
//! event file, when present, must match the regenerated events and pass the
//! budget audit on its own.

use std::fs;
use std::io::BufReader;
use std::path::Path;

use rayon::prelude::*;

use crate::adversary::{audit, read_events, ConstraintCheck};
use crate::env::RegretTrace;
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::output::{events_text, trace_text};
use crate::harness::runner::{run_trial_with_ledger, trial_keys, TrialKey, REPLAY_TOLERANCE};

#[derive(Debug, Clone)]
pub struct TrialAudit {
    pub key: TrialKey,
    pub checks: Vec<ConstraintCheck>,
}

impl TrialAudit {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone)]
pub struct DirectoryAudit {
    pub trials: Vec<TrialAudit>,
}

impl DirectoryAudit {
    pub fn pass(&self) -> bool {
        self.trials.iter().all(TrialAudit::pass)
    }

    pub fn failing(&self) -> impl Iterator<Item = (&TrialKey, &ConstraintCheck)> {
        self.trials
            .iter()
            .flat_map(|t| t.checks.iter().filter(|c| !c.pass).map(move |c| (&t.key, c)))
    }
}

fn flag(name: &str, pass: bool) -> ConstraintCheck {
    ConstraintCheck {
        name: name.into(),
        pass,
        measured: if pass { 1.0 } else { 0.0 },
        limit: 1.0,
    }
}

pub fn audit_directory(dir: &Path) -> Result<DirectoryAudit> {
    let config = ExperimentConfig::load(&dir.join("config.toml"))?;
    let keys = trial_keys(&config);
    let trials: Result<Vec<TrialAudit>> = keys
        .par_iter()
        .map(|key| audit_trial(&config, dir, key))
        .collect();
    Ok(DirectoryAudit { trials: trials? })
}

fn audit_trial(config: &ExperimentConfig, dir: &Path, key: &TrialKey) -> Result<TrialAudit> {
    let (fresh, ledger) = run_trial_with_ledger(config, key)?;
    let mut checks = Vec::new();

    let trace_path = dir.join("traces").join(format!("{}.csv", key.stem()));
    match fs::read_to_string(&trace_path) {
        Ok(text) => {
            checks.push(flag("trace_reproduces", text == trace_text(&fresh.trace)));
            match RegretTrace::read(text.as_bytes(), &trace_path) {
                Ok(stored) => {
                    let dev = ledger.max_deviation(&stored);
                    checks.push(ConstraintCheck {
                        name: "ledger_replay".into(),
                        pass: dev <= REPLAY_TOLERANCE,
                        measured: dev,
                        limit: REPLAY_TOLERANCE,
                    });
                }
                Err(_) => checks.push(flag("trace_parses", false)),
            }
        }
        Err(_) => checks.push(flag("trace_present", false)),
    }

    let adversary = config.adversary_for(key.horizon)?;
    let entry = &config.policies[key.policy_index];
    let block_len = config
        .policy_for(entry, key.horizon, &adversary)?
        .block_len(key.horizon);
    let events_path = dir.join("events").join(format!("{}.rot", key.stem()));
    if config.event_logs {
        match fs::File::open(&events_path) {
            Ok(f) => match read_events(BufReader::new(f), &events_path) {
                Ok(events) => {
                    let text = fs::read_to_string(&events_path).map_err(|e| Error::io(&events_path, e))?;
                    checks.push(flag("events_reproduce", text == events_text(&fresh.events)));
                    let report = audit(&events, &adversary, key.horizon, block_len);
                    checks.extend(report.checks);
                }
                Err(_) => checks.push(flag("events_parse", false)),
            },
            Err(_) => checks.push(flag("events_present", false)),
        }
    } else {
        checks.extend(fresh.audit.checks.clone());
    }
    Ok(TrialAudit {
        key: key.clone(),
        checks,
    })
}

//! Trial execution.

use rayon::prelude::*;

use crate::adversary::{audit, AuditReport, RotEvent};
use crate::common::{make_stream, SeedSpec, POLICY_STREAM};
use crate::env::{Env, Ledger, RegretTrace};
use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::policies::run_to_horizon;

/// Largest tolerated gap between the live regret and the ledger replay.
pub const REPLAY_TOLERANCE: f64 = 1e-9;

/// Identifies one trial. Ordering sorts by policy (config order), then
/// horizon, then seed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TrialKey {
    pub policy_index: usize,
    pub horizon: u64,
    pub seed_index: u64,
    pub policy: String,
}

impl TrialKey {
    /// File stem shared by the trace and event files of this trial.
    pub fn stem(&self) -> String {
        format!("{}_T{}_seed{}", self.policy, self.horizon, self.seed_index)
    }
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub key: TrialKey,
    pub trace: RegretTrace,
    pub events: Vec<RotEvent>,
    pub audit: AuditReport,
    pub replay_deviation: f64,
    pub clip_warnings: usize,
    pub payoff_clamps: Option<usize>,
    pub arms_sampled: u64,
}

impl TrialOutcome {
    pub fn pass(&self) -> bool {
        self.audit.pass() && self.replay_deviation <= REPLAY_TOLERANCE
    }
}

/// Every trial key of the experiment, in canonical order.
pub fn trial_keys(config: &ExperimentConfig) -> Vec<TrialKey> {
    let mut keys = Vec::new();
    for (i, entry) in config.policies.iter().enumerate() {
        for &horizon in &config.horizons {
            for seed_index in 0..config.n_seeds {
                keys.push(TrialKey {
                    policy_index: i,
                    horizon,
                    seed_index,
                    policy: entry.label.clone(),
                });
            }
        }
    }
    keys
}

pub fn run_trial(config: &ExperimentConfig, key: &TrialKey) -> Result<TrialOutcome> {
    run_trial_with_ledger(config, key).map(|(o, _)| o)
}

/// Like [`run_trial`], also returning the hidden ledger of the run.
pub fn run_trial_with_ledger(config: &ExperimentConfig, key: &TrialKey) -> Result<(TrialOutcome, Ledger)> {
    let entry = config
        .policies
        .get(key.policy_index)
        .ok_or_else(|| Error::Config(format!("no policy #{}", key.policy_index)))?;
    let horizon = key.horizon;
    let adversary = config.adversary_for(horizon)?;
    let policy_spec = config.policy_for(entry, horizon, &adversary)?;
    let seed = SeedSpec::new(config.master_seed, key.seed_index);
    let mut policy = policy_spec.build(horizon, make_stream(seed, POLICY_STREAM))?;
    let mut env = Env::new(config.horizon_config(horizon)?, seed, adversary.clone(), config.noise)?;
    run_to_horizon(policy.as_mut(), &mut env)?;

    let ledger = env.ledger();
    let report = audit(&ledger.events, &adversary, horizon, policy_spec.block_len(horizon));
    let clip_warnings = env.adversary().warnings().len();
    let arms_sampled = env.arms_sampled();
    let trace = env.into_trace(seed, &entry.label);
    let replay_deviation = ledger.max_deviation(&trace);
    let outcome = TrialOutcome {
        key: key.clone(),
        trace,
        events: ledger.events.clone(),
        audit: report,
        replay_deviation,
        clip_warnings,
        payoff_clamps: policy.payoff_clamps(),
        arms_sampled,
    };
    Ok((outcome, ledger))
}

/// Runs `keys` on a pool of `parallel` threads (all cores when `None`).
/// Results come back in key order whatever the scheduling.
pub fn run_trials(
    config: &ExperimentConfig,
    keys: &[TrialKey],
    parallel: Option<usize>,
) -> Result<Vec<(TrialKey, Result<TrialOutcome>)>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = parallel {
        if n == 0 {
            return Err(Error::Config("--parallel must be >= 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let mut results: Vec<_> = pool.install(|| {
        keys.par_iter()
            .map(|k| (k.clone(), run_trial(config, k)))
            .collect()
    });
    results.sort_by(|a: &(TrialKey, _), b: &(TrialKey, _)| a.0.cmp(&b.0));
    Ok(results)
}

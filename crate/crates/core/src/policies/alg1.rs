//! UCB-threshold policy with an adaptive sliding window.
//!
//! The active arm is pulled every step until the smallest window-UCB over the
//! doubling windows ending at `t − 1` drops below `1 − δ`; the arm is then
//! withdrawn for good and a fresh arm is pulled in the same step.

use crate::common::{ArmId, Observation};
use crate::env::Bandit;
use crate::error::{Error, Result};
use crate::windowstats::RunStats;

use super::{Decision, Policy};

/// Threshold test at step `t`. A run with no pulls yet is always kept.
pub fn alg1_decide(stats: &RunStats, t: u64, delta: f64, log_arg: f64) -> Decision {
    if stats.count() == 0 {
        return Decision::Keep;
    }
    if stats.min_wucb(t, log_arg) < 1.0 - delta {
        Decision::Discard
    } else {
        Decision::Keep
    }
}

#[derive(Debug, Clone)]
pub struct Alg1 {
    delta: f64,
    log_arg: f64,
    active: Option<ArmId>,
    stats: RunStats,
    discards: u64,
}

impl Alg1 {
    /// `log_arg` is the argument of the logarithm in the confidence bonus;
    /// the horizon `T` for the standalone policy.
    pub fn new(delta: f64, log_arg: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Config(format!("delta must lie in (0, 1), got {delta}")));
        }
        if !(log_arg > 1.0) {
            return Err(Error::Config(format!("log argument must exceed 1, got {log_arg}")));
        }
        Ok(Alg1 {
            delta,
            log_arg,
            active: None,
            stats: RunStats::new(1),
            discards: 0,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn discards(&self) -> u64 {
        self.discards
    }

    pub fn active(&self) -> Option<ArmId> {
        self.active
    }
}

impl Policy for Alg1 {
    fn name(&self) -> &'static str {
        "alg1"
    }

    fn step(&mut self, env: &mut dyn Bandit) -> Result<Observation> {
        let t = env.next_step();
        let arm = match self.active {
            Some(arm) if alg1_decide(&self.stats, t, self.delta, self.log_arg) == Decision::Keep => {
                arm
            }
            current => {
                if let Some(old) = current {
                    env.discard(old)?;
                    self.discards += 1;
                }
                let fresh = env.new_arm();
                self.stats.reset(t);
                self.active = Some(fresh);
                fresh
            }
        };
        let obs = env.pull(arm)?;
        self.stats.record(obs.reward);
        Ok(obs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::run_to_horizon;
    use crate::policies::scripted::ScriptedBandit;
    use std::f64::consts::E;

    #[test]
    fn empty_run_is_kept() {
        assert_eq!(alg1_decide(&RunStats::new(1), 1, 0.5, E), Decision::Keep);
    }

    #[test]
    fn good_arm_is_kept_forever() {
        for mu in [1.0, 0.95, 0.9] {
            let mut env = ScriptedBandit::new(5000, &[mu], 0.0);
            let mut p = Alg1::new(0.1, 5000.0).unwrap();
            run_to_horizon(&mut p, &mut env).unwrap();
            assert_eq!(p.discards(), 0);
            assert_eq!(env.first_run_len(), 5000);
        }
    }

    #[test]
    fn bad_arm_is_dropped_at_the_next_power_of_two() {
        // N* = 12 ln L / gap^2; only windows of length 2^k are candidates.
        for (mu, delta, expected) in [
            (0.3, 0.2, 64usize), // N* = 48
            (0.5, 0.25, 256),    // N* = 192
            (0.1, 0.2, 32),      // N* = 24.5
            (0.7, 0.2, 2048),    // N* = 1200
        ] {
            let mut env = ScriptedBandit::new(5000, &[mu], 1.0);
            let mut p = Alg1::new(delta, E).unwrap();
            run_to_horizon(&mut p, &mut env).unwrap();
            let gap: f64 = 1.0 - delta - mu;
            let n_star = 12.0 / (gap * gap);
            assert_eq!(env.first_run_len(), expected, "mu={mu}");
            assert!(expected as f64 <= 2.0 * n_star + 1.0);
            // The replacement is pulled in the discard step itself.
            assert_eq!(env.pulls[expected].0, 1);
            assert!(env.discarded[0]);
            assert_eq!(p.discards(), 1);
        }
    }

    #[test]
    fn decisions_depend_only_on_the_gap() {
        let run = |mu: f64, delta: f64| {
            let script: Vec<f64> = (0..50).map(|i| mu - 0.0078125 * (i % 4) as f64).collect();
            let mut env = ScriptedBandit::new(4000, &script, mu);
            let mut p = Alg1::new(delta, E).unwrap();
            run_to_horizon(&mut p, &mut env).unwrap();
            env.pulls
        };
        let a = run(0.25, 0.25);
        assert_eq!(a, run(0.375, 0.125));
        assert_eq!(a, run(0.125, 0.375));
        assert_ne!(a, run(0.25, 0.125));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Alg1::new(0.0, 10.0).is_err());
        assert!(Alg1::new(1.0, 10.0).is_err());
        assert!(Alg1::new(0.5, 1.0).is_err());
    }
}

//! Threshold UCB tuned to a known maximum rotting rate.
//!
//! Reconstruction of the baseline: each observation of the run is de-biased
//! by the worst-case rot accumulated before it, giving an estimate of the
//! arm's initial mean, `(1/n) Σ_i (r_i + ρ (i − 1))`. The index then
//! subtracts the worst-case rot `ρ n` and adds `sqrt(12 ln T / n)`.

use crate::common::{ArmId, Observation};
use crate::env::Bandit;
use crate::error::{Error, Result};

use super::{Decision, Policy};

/// Default threshold `max{ρ^(1/3), T^(−1/2)}`, capped at 1 for rates above 1.
pub fn default_tp_delta(rho_max: f64, horizon: u64) -> f64 {
    rho_max.cbrt().max((horizon as f64).powf(-0.5)).min(1.0)
}

/// Worst-case-rotting index of a run with `n` pulls and reward sum
/// `reward_sum`.
pub fn tp_index(n: u64, reward_sum: f64, rho_max: f64, ln_horizon: f64) -> f64 {
    let nf = n as f64;
    let initial_estimate = (reward_sum + rho_max * nf * (nf - 1.0) / 2.0) / nf;
    initial_estimate - rho_max * nf + (12.0 * ln_horizon / nf).sqrt()
}

pub fn ucb_tp_decide(
    n: u64,
    reward_sum: f64,
    rho_max: f64,
    delta_tp: f64,
    ln_horizon: f64,
) -> Decision {
    if n == 0 {
        return Decision::Keep;
    }
    if tp_index(n, reward_sum, rho_max, ln_horizon) < 1.0 - delta_tp {
        Decision::Discard
    } else {
        Decision::Keep
    }
}

#[derive(Debug, Clone)]
pub struct UcbTp {
    rho_max: f64,
    delta: f64,
    ln_horizon: f64,
    active: Option<ArmId>,
    pulls: u64,
    reward_sum: f64,
}

impl UcbTp {
    pub fn new(horizon: u64, rho_max: f64, delta: Option<f64>) -> Result<Self> {
        if !(rho_max >= 0.0 && rho_max.is_finite()) {
            return Err(Error::Config(format!("rho_max must be >= 0, got {rho_max}")));
        }
        let delta = delta.unwrap_or_else(|| default_tp_delta(rho_max, horizon));
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::Config(format!("ucb_tp delta must lie in (0, 1], got {delta}")));
        }
        Ok(UcbTp {
            rho_max,
            delta,
            ln_horizon: (horizon as f64).ln(),
            active: None,
            pulls: 0,
            reward_sum: 0.0,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

impl Policy for UcbTp {
    fn name(&self) -> &'static str {
        "ucb_tp"
    }

    fn step(&mut self, env: &mut dyn Bandit) -> Result<Observation> {
        let keep = ucb_tp_decide(
            self.pulls,
            self.reward_sum,
            self.rho_max,
            self.delta,
            self.ln_horizon,
        ) == Decision::Keep;
        let arm = match self.active {
            Some(arm) if keep => arm,
            current => {
                if let Some(old) = current {
                    env.discard(old)?;
                }
                self.pulls = 0;
                self.reward_sum = 0.0;
                let fresh = env.new_arm();
                self.active = Some(fresh);
                fresh
            }
        };
        let obs = env.pull(arm)?;
        self.pulls += 1;
        self.reward_sum += obs.reward;
        Ok(obs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::run_to_horizon;
    use crate::policies::scripted::ScriptedBandit;

    #[test]
    fn zero_rate_discards_once_full_run_bonus_beats_gap() {
        // 0.3 + sqrt(12 / n) < 0.8 first holds at n = 49.
        let first = (1..1000u64)
            .find(|&n| ucb_tp_decide(n, 0.3 * n as f64, 0.0, 0.2, 1.0) == Decision::Discard)
            .unwrap();
        assert_eq!(first, 49);
    }

    #[test]
    fn matching_rate_recovers_initial_mean_exactly() {
        let (mu, rho) = (0.8, 0.001);
        let mut env = ScriptedBandit::new(100, &[mu], 0.0);
        env.rho = rho;
        let arm = env.new_arm();
        let n = 100u64;
        let rewards: f64 = (0..n).map(|_| env.pull(arm).unwrap().reward).sum();
        let bonus = (12.0 * 3.0 / n as f64).sqrt();
        let initial = tp_index(n, rewards, rho, 3.0) - bonus + rho * n as f64;
        assert!((initial - mu).abs() < 1e-12);
    }

    #[test]
    fn default_threshold() {
        assert!((default_tp_delta(0.001, 1_000_000) - 0.1).abs() < 1e-12);
        assert!((default_tp_delta(0.0, 10_000) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn policy_runs_and_replaces_bad_arms() {
        let mut env = ScriptedBandit::new(3000, &[0.0, 0.0], 1.0);
        let mut p = UcbTp::new(3000, 0.0, Some(0.1)).unwrap();
        run_to_horizon(&mut p, &mut env).unwrap();
        assert!(env.discarded[0] && env.discarded[1]);
        assert_eq!(env.mu.len(), 3);
        assert!(UcbTp::new(10, -1.0, None).is_err());
        assert!(UcbTp::new(10, 0.0, Some(0.0)).is_err());
    }
}

//! Subsampling UCB: draw `K` arms up front and run UCB1 over them.

use crate::common::{ArmId, Observation};
use crate::env::Bandit;
use crate::error::{Error, Result};

use super::Policy;

#[derive(Debug, Clone)]
pub struct Ssucb {
    subsample: usize,
    arms: Vec<ArmId>,
    counts: Vec<u64>,
    sums: Vec<f64>,
}

impl Ssucb {
    pub fn new(subsample: u64) -> Result<Self> {
        if subsample < 1 {
            return Err(Error::Config("ssucb subsample size must be >= 1".into()));
        }
        Ok(Ssucb {
            subsample: subsample as usize,
            arms: Vec::new(),
            counts: Vec::new(),
            sums: Vec::new(),
        })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn arms(&self) -> &[ArmId] {
        &self.arms
    }

    fn select(&self, t: u64) -> usize {
        if let Some(i) = self.counts.iter().position(|&n| n == 0) {
            return i;
        }
        let two_ln_t = 2.0 * (t as f64).ln();
        let mut best = 0;
        let mut best_index = f64::NEG_INFINITY;
        for (i, (&n, &sum)) in self.counts.iter().zip(&self.sums).enumerate() {
            let nf = n as f64;
            let index = sum / nf + (two_ln_t / nf).sqrt();
            if index > best_index {
                best_index = index;
                best = i;
            }
        }
        best
    }
}

impl Policy for Ssucb {
    fn name(&self) -> &'static str {
        "ssucb"
    }

    fn step(&mut self, env: &mut dyn Bandit) -> Result<Observation> {
        if self.arms.is_empty() {
            self.arms = (0..self.subsample).map(|_| env.new_arm()).collect();
            self.counts = vec![0; self.subsample];
            self.sums = vec![0.0; self.subsample];
        }
        let i = self.select(env.next_step());
        let obs = env.pull(self.arms[i])?;
        self.counts[i] += 1;
        self.sums[i] += obs.reward;
        Ok(obs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::run_to_horizon;
    use crate::policies::scripted::ScriptedBandit;

    #[test]
    fn single_arm_is_pulled_every_step() {
        let mut env = ScriptedBandit::new(500, &[0.4], 0.0);
        let mut p = Ssucb::new(1).unwrap();
        run_to_horizon(&mut p, &mut env).unwrap();
        assert_eq!(p.counts(), &[500]);
        assert_eq!(env.mu.len(), 1);
    }

    #[test]
    fn worst_arm_stays_within_ucb1_bound() {
        let horizon = 10_000;
        let mut env = ScriptedBandit::new(horizon, &[1.0, 0.0], 0.5);
        let mut p = Ssucb::new(2).unwrap();
        run_to_horizon(&mut p, &mut env).unwrap();
        let bad = p.counts()[1] as f64;
        assert!(bad >= 1.0);
        assert!(bad <= 2.0 * (horizon as f64).ln() + 1.0, "bad arm pulled {bad} times");
        assert_eq!(p.counts().iter().sum::<u64>(), horizon);
        assert!(env.discarded.iter().all(|d| !d));
    }

    #[test]
    fn zero_subsample_is_rejected() {
        assert!(Ssucb::new(0).is_err());
    }
}

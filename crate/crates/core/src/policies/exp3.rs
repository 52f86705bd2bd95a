//! EXP3 master over a finite set of candidate thresholds.

use crate::common::Stream;
use crate::error::{Error, Result};

/// Exploration rate `min{1, sqrt(B ln B / ((e − 1) · blocks))}`.
pub fn exp3_alpha(candidates: usize, blocks: u64) -> f64 {
    let b = candidates as f64;
    let raw = (b * b.ln() / ((std::f64::consts::E - 1.0) * blocks as f64)).sqrt();
    raw.min(1.0)
}

/// `{1/2, 1/4, …, 1/2^k}` with `k = ⌈log2(√H / c1)⌉` (at least one entry).
pub fn candidate_thresholds(block_len: u64, c1: f64) -> Vec<f64> {
    let k = ((block_len as f64).sqrt() / c1).log2().ceil().max(1.0) as i32;
    (1..=k).map(|i| 0.5f64.powi(i)).collect()
}

/// Result of one weight update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffUpdate {
    /// Rescaled payoff after clamping to `[0, 1]`.
    pub payoff: f64,
    /// Payoff before clamping.
    pub raw_payoff: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone)]
pub struct Exp3State {
    candidates: Vec<f64>,
    weights: Vec<f64>,
    alpha: f64,
}

impl Exp3State {
    pub fn new(candidates: Vec<f64>, alpha: f64) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::Config("EXP3 needs at least one candidate".into()));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Config(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        let weights = vec![1.0; candidates.len()];
        Ok(Exp3State {
            candidates,
            weights,
            alpha,
        })
    }

    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `p(k) = (1 − α) w(k) / Σ w + α / B`.
    pub fn probs(&self) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        let floor = self.alpha / self.candidates.len() as f64;
        self.weights
            .iter()
            .map(|w| (1.0 - self.alpha) * w / total + floor)
            .collect()
    }

    /// Inverse-CDF draw of an index from `probs`.
    pub fn sample(probs: &[f64], stream: &mut Stream) -> usize {
        let u = stream.uniform() * probs.iter().sum::<f64>();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.len() - 1
    }

    /// Importance-weighted exponential update of the chosen candidate with
    /// the block payoff `1/2 + Σr / (C·H·ln H + 4·sqrt(H·ln T))`.
    pub fn update(
        &mut self,
        chosen: usize,
        p_chosen: f64,
        block_reward_sum: f64,
        block_len: u64,
        horizon: u64,
        rescale: f64,
    ) -> PayoffUpdate {
        let h = block_len as f64;
        let scale = rescale * h * h.ln() + 4.0 * (h * (horizon as f64).ln()).sqrt();
        let raw_payoff = 0.5 + block_reward_sum / scale;
        let payoff = raw_payoff.clamp(0.0, 1.0);
        let b = self.candidates.len() as f64;
        self.weights[chosen] *= (self.alpha / (b * p_chosen) * payoff).exp();
        // Rescaling by the maximum leaves the probabilities unchanged.
        let max = self.weights.iter().copied().fold(0.0, f64::max);
        if max > 1e100 {
            for w in &mut self.weights {
                *w /= max;
            }
        }
        PayoffUpdate {
            payoff,
            raw_payoff,
            clamped: payoff != raw_payoff,
        }
    }
}

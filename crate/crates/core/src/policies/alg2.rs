//! Parameter-free bandit-over-bandit wrapper.
//!
//! The horizon is cut into blocks of `H` steps. Each block starts on a brand
//! new arm, draws a threshold from the EXP3 master and runs the threshold
//! policy with `ln H` in the confidence bonus. At the block's last step the
//! master is paid with the rescaled sum of the block's rewards.

use crate::common::{ArmId, Observation, Stream};
use crate::env::Bandit;
use crate::error::{Error, Result};
use crate::windowstats::RunStats;

use super::alg1::alg1_decide;
use super::exp3::{candidate_thresholds, exp3_alpha, Exp3State};
use super::{Decision, Policy};

/// Master-level record of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockRecord {
    pub start: u64,
    pub end: u64,
    pub probs: Vec<f64>,
    pub chosen: usize,
    pub reward_sum: f64,
    pub payoff: f64,
    pub clamped: bool,
}

#[derive(Debug, Clone)]
pub struct Alg2 {
    horizon: u64,
    block_len: u64,
    rescale: f64,
    log_arg: f64,
    exp3: Exp3State,
    stream: Stream,
    active: Option<ArmId>,
    stats: RunStats,
    block_start: u64,
    block_end: u64,
    block_sum: f64,
    current: Option<(usize, Vec<f64>)>,
    history: Vec<BlockRecord>,
}

impl Alg2 {
    pub fn new(horizon: u64, block_len: u64, c1: f64, rescale: f64, stream: Stream) -> Result<Self> {
        if block_len < 2 {
            return Err(Error::Config(format!("block length must be >= 2, got {block_len}")));
        }
        if !(c1 > 0.0 && c1 < 1.0) {
            return Err(Error::Config(format!("c1 must lie in (0, 1), got {c1}")));
        }
        if !(rescale > 0.0 && rescale.is_finite()) {
            return Err(Error::Config(format!("rescaling constant must be > 0, got {rescale}")));
        }
        let candidates = candidate_thresholds(block_len, c1);
        let alpha = exp3_alpha(candidates.len(), horizon.div_ceil(block_len));
        Ok(Alg2 {
            horizon,
            block_len,
            rescale,
            log_arg: block_len as f64,
            exp3: Exp3State::new(candidates, alpha)?,
            stream,
            active: None,
            stats: RunStats::new(1),
            block_start: 0,
            block_end: 0,
            block_sum: 0.0,
            current: None,
            history: Vec::new(),
        })
    }

    pub fn exp3(&self) -> &Exp3State {
        &self.exp3
    }

    pub fn history(&self) -> &[BlockRecord] {
        &self.history
    }

    pub fn clamp_events(&self) -> usize {
        self.history.iter().filter(|b| b.clamped).count()
    }

    fn select_fresh(&mut self, env: &mut dyn Bandit, t: u64) -> ArmId {
        let arm = env.new_arm();
        self.stats.reset(t);
        self.active = Some(arm);
        arm
    }
}

impl Policy for Alg2 {
    fn name(&self) -> &'static str {
        "alg2"
    }

    fn payoff_clamps(&self) -> Option<usize> {
        Some(self.clamp_events())
    }

    fn step(&mut self, env: &mut dyn Bandit) -> Result<Observation> {
        let t = env.next_step();
        let obs = if t > self.block_end {
            // Block start: the previous block's arm is never re-adopted.
            self.block_start = t;
            self.block_end = (t + self.block_len - 1).min(self.horizon);
            self.block_sum = 0.0;
            let arm = self.select_fresh(env, t);
            let obs = env.pull(arm)?;
            let probs = self.exp3.probs();
            let chosen = Exp3State::sample(&probs, &mut self.stream);
            self.current = Some((chosen, probs));
            obs
        } else {
            let (chosen, _) = self.current.as_ref().expect("block in progress");
            let delta = self.exp3.candidates()[*chosen];
            let arm = match self.active {
                Some(arm) if alg1_decide(&self.stats, t, delta, self.log_arg) == Decision::Keep => {
                    arm
                }
                current => {
                    if let Some(old) = current {
                        env.discard(old)?;
                    }
                    self.select_fresh(env, t)
                }
            };
            env.pull(arm)?
        };
        self.stats.record(obs.reward);
        self.block_sum += obs.reward;
        if t == self.block_end {
            let (chosen, probs) = self.current.take().expect("block in progress");
            let update = self.exp3.update(
                chosen,
                probs[chosen],
                self.block_sum,
                self.block_len,
                self.horizon,
                self.rescale,
            );
            self.history.push(BlockRecord {
                start: self.block_start,
                end: self.block_end,
                probs,
                chosen,
                reward_sum: self.block_sum,
                payoff: update.payoff,
                clamped: update.clamped,
            });
        }
        Ok(obs)
    }
}

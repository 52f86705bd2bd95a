//! Decision algorithms.
//!
//! Every policy is a per-trial state machine behind [`Policy`]: each call to
//! [`Policy::step`] performs exactly one pull, either on the active arm or,
//! after withdrawing it, on a fresh one. Policies see the environment only
//! through [`Bandit`], so they can never read true means.

pub mod alg1;
pub mod alg2;
pub mod exp3;
pub mod fresh;
pub mod ssucb;
pub mod tuning;
pub mod ucb_tp;

use crate::common::{Observation, Stream};
use crate::env::Bandit;
use crate::error::{Error, Result};

pub use alg1::{alg1_decide, Alg1};
pub use alg2::{Alg2, BlockRecord};
pub use exp3::{candidate_thresholds, exp3_alpha, Exp3State, PayoffUpdate};
pub use fresh::FreshArm;
pub use ssucb::Ssucb;
pub use tuning::{delta_s, delta_v, tuned_delta};
pub use ucb_tp::{default_tp_delta, ucb_tp_decide, UcbTp};

pub const DEFAULT_C1: f64 = 0.5;
pub const DEFAULT_RESCALE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Keep,
    Discard,
}

pub trait Policy: Send {
    fn name(&self) -> &'static str;

    /// Performs one pull.
    fn step(&mut self, env: &mut dyn Bandit) -> Result<Observation>;

    /// Number of clamped block payoffs, for policies that rescale payoffs.
    fn payoff_clamps(&self) -> Option<usize> {
        None
    }
}

/// Steps `policy` until the horizon is exhausted.
pub fn run_to_horizon(policy: &mut dyn Policy, env: &mut dyn Bandit) -> Result<()> {
    while env.remaining() > 0 {
        policy.step(env)?;
    }
    Ok(())
}

/// Where the threshold `δ` of the standalone threshold policy comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Threshold {
    Fixed(f64),
    /// `min{δ_V, δ_S}` over the known budgets.
    Tuned {
        c1: f64,
        beta: f64,
        v_budget: Option<f64>,
        s_budget: Option<u64>,
    },
}

impl Threshold {
    pub fn resolve(&self, horizon: u64) -> Result<f64> {
        match *self {
            Threshold::Fixed(d) => Ok(d),
            Threshold::Tuned {
                c1,
                beta,
                v_budget,
                s_budget,
            } => tuned_delta(beta, v_budget, s_budget, horizon, c1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolicySpec {
    Alg1 {
        threshold: Threshold,
    },
    Alg2 {
        /// Defaults to `⌈√T⌉`.
        block_len: Option<u64>,
        c1: f64,
        rescale: f64,
    },
    UcbTp {
        rho_max: f64,
        /// Defaults to `max{ρ^(1/3), T^(−1/2)}`.
        delta: Option<f64>,
    },
    Ssucb {
        /// Defaults to `⌈√T⌉`.
        subsample: Option<u64>,
    },
    FreshArm,
}

pub fn ceil_sqrt(horizon: u64) -> u64 {
    let r = horizon.isqrt();
    if r * r == horizon {
        r
    } else {
        r + 1
    }
}

impl PolicySpec {
    pub fn name(&self) -> &'static str {
        match self {
            PolicySpec::Alg1 { .. } => "alg1",
            PolicySpec::Alg2 { .. } => "alg2",
            PolicySpec::UcbTp { .. } => "ucb_tp",
            PolicySpec::Ssucb { .. } => "ssucb",
            PolicySpec::FreshArm => "fresh_arm",
        }
    }

    /// Block length used by the bandit-over-bandit policy, if this is one.
    pub fn block_len(&self, horizon: u64) -> Option<u64> {
        match self {
            PolicySpec::Alg2 { block_len, .. } => Some(block_len.unwrap_or(ceil_sqrt(horizon))),
            _ => None,
        }
    }

    /// Instantiates the policy for horizon `T`. `stream` feeds the policy's
    /// own randomness (only the EXP3 master draws from it).
    pub fn build(&self, horizon: u64, stream: Stream) -> Result<Box<dyn Policy>> {
        Ok(match self {
            PolicySpec::Alg1 { threshold } => {
                let delta = threshold.resolve(horizon)?;
                Box::new(Alg1::new(delta, horizon as f64)?)
            }
            PolicySpec::Alg2 { c1, rescale, .. } => {
                let h = self.block_len(horizon).expect("alg2 has a block length");
                Box::new(Alg2::new(horizon, h, *c1, *rescale, stream)?)
            }
            PolicySpec::UcbTp { rho_max, delta } => Box::new(UcbTp::new(horizon, *rho_max, *delta)?),
            PolicySpec::Ssucb { subsample } => {
                let k = subsample.unwrap_or(ceil_sqrt(horizon));
                if k < 1 {
                    return Err(Error::Config("ssucb subsample size must be >= 1".into()));
                }
                Box::new(Ssucb::new(k)?)
            }
            PolicySpec::FreshArm => Box::new(FreshArm),
        })
    }
}

//! The bandit environment.
//!
//! [`Env`] serves pulls, injects noise, asks the adversary for a rotting
//! rate and charges regret. Policies only ever see it through the
//! [`Bandit`] trait, which exposes rewards and nothing about true means.
//! The true means live in a hidden ledger used for regret accounting and
//! audits.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::adversary::{AdversarySpec, AdversaryState, PulledArm, RotEvent};
use crate::common::{
    make_stream, ArmId, HorizonConfig, Observation, SeedSpec, Stream, NOISE_STREAM,
    RESERVOIR_STREAM,
};
use crate::error::{Error, Result};
use crate::reservoir::{ArmRecord, Reservoir};

/// The policy-facing side of the environment.
pub trait Bandit {
    fn horizon(&self) -> u64;

    /// Step index (1-based) of the next pull.
    fn next_step(&self) -> u64;

    fn remaining(&self) -> u64 {
        self.horizon() + 1 - self.next_step()
    }

    /// Draws a fresh arm from the reservoir.
    fn new_arm(&mut self) -> ArmId;

    /// Withdraws an arm permanently.
    fn discard(&mut self, arm: ArmId) -> Result<()>;

    fn pull(&mut self, arm: ArmId) -> Result<Observation>;
}

#[derive(Debug)]
pub struct Env {
    horizon: HorizonConfig,
    t: u64,
    reservoir: Reservoir,
    adversary: AdversaryState,
    arms: Vec<ArmRecord>,
    noise: Option<Stream>,
    pulls: Vec<ArmId>,
    cumulative_regret: f64,
    checkpoints: Vec<(u64, f64)>,
}

impl Env {
    pub fn new(
        horizon: HorizonConfig,
        seed: SeedSpec,
        adversary: AdversarySpec,
        noise: bool,
    ) -> Result<Self> {
        let reservoir = Reservoir::new(make_stream(seed, RESERVOIR_STREAM), horizon.beta)?;
        let adversary = AdversaryState::new(adversary, horizon.horizon)?;
        Ok(Env {
            horizon,
            t: 0,
            reservoir,
            adversary,
            arms: Vec::new(),
            noise: noise.then(|| make_stream(seed, NOISE_STREAM)),
            pulls: Vec::with_capacity(horizon.horizon as usize),
            cumulative_regret: 0.0,
            checkpoints: Vec::new(),
        })
    }

    pub fn config(&self) -> &HorizonConfig {
        &self.horizon
    }

    /// Number of pulls served so far.
    pub fn steps_taken(&self) -> u64 {
        self.t
    }

    pub fn is_done(&self) -> bool {
        self.t >= self.horizon.horizon
    }

    pub fn cumulative_regret(&self) -> f64 {
        self.cumulative_regret
    }

    pub fn adversary(&self) -> &AdversaryState {
        &self.adversary
    }

    pub fn arms_sampled(&self) -> u64 {
        self.arms.len() as u64
    }

    pub fn is_active(&self, arm: ArmId) -> bool {
        self.arms.get(arm.0 as usize).is_some_and(|a| !a.discarded)
    }

    /// Hidden ledger entry for an arm. Not reachable through [`Bandit`].
    pub fn truth(&self, arm: ArmId) -> Option<&ArmRecord> {
        self.arms.get(arm.0 as usize)
    }

    pub fn checkpoints(&self) -> &[(u64, f64)] {
        &self.checkpoints
    }

    /// Snapshot of everything needed to recompute regret independently.
    pub fn ledger(&self) -> Ledger {
        Ledger {
            mu_initial: self.arms.iter().map(|a| a.mu_initial).collect(),
            pulls: self.pulls.clone(),
            events: self.adversary.events().to_vec(),
        }
    }

    pub fn into_trace(self, seed: SeedSpec, policy: &str) -> RegretTrace {
        RegretTrace {
            checkpoints: self.checkpoints,
            seed,
            policy: policy.to_string(),
            adversary: self.adversary.spec().name().to_string(),
        }
    }

    fn arm_mut(&mut self, arm: ArmId) -> Result<&mut ArmRecord> {
        self.arms
            .get_mut(arm.0 as usize)
            .ok_or_else(|| Error::Contract(format!("arm {arm} was never sampled")))
    }
}

impl Bandit for Env {
    fn horizon(&self) -> u64 {
        self.horizon.horizon
    }

    fn next_step(&self) -> u64 {
        self.t + 1
    }

    fn new_arm(&mut self) -> ArmId {
        let mut arm = self.reservoir.sample_arm();
        arm.run_start = self.t + 1;
        let id = arm.id;
        debug_assert_eq!(id.0 as usize, self.arms.len());
        self.arms.push(arm);
        id
    }

    fn discard(&mut self, arm: ArmId) -> Result<()> {
        let rec = self.arm_mut(arm)?;
        if rec.discarded {
            return Err(Error::Contract(format!("arm {arm} discarded twice")));
        }
        rec.discarded = true;
        Ok(())
    }

    fn pull(&mut self, arm: ArmId) -> Result<Observation> {
        let horizon = self.horizon.horizon;
        if self.t >= horizon {
            return Err(Error::Horizon {
                step: self.t + 1,
                horizon,
            });
        }
        let step = self.t + 1;
        let eta = self.noise.as_mut().map_or(0.0, |s| s.standard_gaussian());
        let rec = self
            .arms
            .get_mut(arm.0 as usize)
            .ok_or_else(|| Error::Contract(format!("arm {arm} was never sampled")))?;
        if rec.discarded {
            return Err(Error::Contract(format!("pulled discarded arm {arm}")));
        }
        let mu = rec.mu_current;
        rec.pulls += 1;
        let view = PulledArm {
            id: rec.id,
            mu_initial: rec.mu_initial,
            mu_current: mu,
            pulls: rec.pulls,
        };
        // Regret is charged on the pre-rot mean.
        self.cumulative_regret += 1.0 - mu;
        self.t = step;
        self.pulls.push(arm);
        let rho = self.adversary.rot(step, &view);
        if rho != 0.0 {
            self.arms[arm.0 as usize].mu_current = mu - rho;
        }
        if step % self.horizon.checkpoint_stride == 0 || step == horizon {
            self.checkpoints.push((step, self.cumulative_regret));
        }
        Ok(Observation {
            reward: mu + eta,
            arm,
            step,
        })
    }
}

/// Initial means, pull sequence and rot events of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Ledger {
    pub mu_initial: Vec<f64>,
    pub pulls: Vec<ArmId>,
    pub events: Vec<RotEvent>,
}

impl Ledger {
    /// Cumulative regret after every step, recomputed from scratch.
    pub fn replay(&self) -> Vec<f64> {
        let mut mu = self.mu_initial.clone();
        let mut events = self.events.iter().peekable();
        let mut total = 0.0;
        let mut out = Vec::with_capacity(self.pulls.len());
        for (i, arm) in self.pulls.iter().enumerate() {
            let t = i as u64 + 1;
            total += 1.0 - mu[arm.0 as usize];
            out.push(total);
            while let Some(e) = events.next_if(|e| e.t == t) {
                mu[e.arm.0 as usize] -= e.rho;
            }
        }
        out
    }

    /// Largest absolute difference between the replayed regret and the
    /// trace checkpoints.
    pub fn max_deviation(&self, trace: &RegretTrace) -> f64 {
        let replayed = self.replay();
        let mut worst: f64 = 0.0;
        for &(t, r) in &trace.checkpoints {
            let d = match replayed.get((t as usize).wrapping_sub(1)) {
                Some(x) => (x - r).abs(),
                None => f64::INFINITY,
            };
            worst = worst.max(d);
        }
        if trace.checkpoints.last().map(|c| c.0) != Some(self.pulls.len() as u64) {
            worst = f64::INFINITY;
        }
        worst
    }
}

/// Checkpointed cumulative regret of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTrace {
    pub checkpoints: Vec<(u64, f64)>,
    pub seed: SeedSpec,
    pub policy: String,
    pub adversary: String,
}

impl RegretTrace {
    pub fn final_regret(&self) -> f64 {
        self.checkpoints.last().map_or(0.0, |c| c.1)
    }

    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# policy={}", self.policy)?;
        writeln!(w, "# seed={}", self.seed)?;
        writeln!(w, "# adversary={}", self.adversary)?;
        for (t, r) in &self.checkpoints {
            writeln!(w, "{t},{r:?}")?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(r: R, path: &Path) -> Result<Self> {
        let mut policy = None;
        let mut seed = None;
        let mut adversary = None;
        let mut checkpoints = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            if let Some(header) = line.strip_prefix("# ") {
                let (key, value) = header
                    .split_once('=')
                    .ok_or_else(|| err(format!("bad header {line:?}")))?;
                match key {
                    "policy" => policy = Some(value.to_string()),
                    "adversary" => adversary = Some(value.to_string()),
                    "seed" => {
                        let (m, i) = value
                            .split_once(',')
                            .ok_or_else(|| err(format!("bad seed {value:?}")))?;
                        seed = Some(SeedSpec::new(
                            m.parse().map_err(|e| err(format!("bad master seed: {e}")))?,
                            i.parse().map_err(|e| err(format!("bad trial index: {e}")))?,
                        ));
                    }
                    _ => return Err(err(format!("unknown header key {key:?}"))),
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let (t, r) = line
                .split_once(',')
                .ok_or_else(|| err(format!("expected t,cumulative_regret, got {line:?}")))?;
            let t: u64 = t.parse().map_err(|e| err(format!("bad t: {e}")))?;
            let r: f64 = r.parse().map_err(|e| err(format!("bad regret: {e}")))?;
            if checkpoints.last().is_some_and(|&(prev, _)| prev >= t) {
                return Err(err(format!("checkpoint t={t} not increasing")));
            }
            checkpoints.push((t, r));
        }
        let missing = |what: &str| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: format!("missing {what} header"),
        };
        Ok(RegretTrace {
            checkpoints,
            seed: seed.ok_or_else(|| missing("seed"))?,
            policy: policy.ok_or_else(|| missing("policy"))?,
            adversary: adversary.ok_or_else(|| missing("adversary"))?,
        })
    }
}

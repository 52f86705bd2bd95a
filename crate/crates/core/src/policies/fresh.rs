use crate::common::Observation;
use crate::env::Bandit;
use crate::error::Result;

use super::Policy;

/// Pulls a brand-new arm every round.
#[derive(Debug, Clone, Default)]
pub struct FreshArm;

impl Policy for FreshArm {
    fn name(&self) -> &'static str {
        "fresh_arm"
    }

    fn step(&mut self, env: &mut dyn Bandit) -> Result<Observation> {
        let arm = env.new_arm();
        let obs = env.pull(arm)?;
        env.discard(arm)?;
        Ok(obs)
    }
}

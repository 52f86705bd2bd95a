#![allow(dead_code)]

use std::collections::HashSet;

use rotbandit::adversary::AdversarySpec;
use rotbandit::common::{make_stream, POLICY_STREAM};
use rotbandit::env::{Bandit, Env};
use rotbandit::policies::{run_to_horizon, PolicySpec, Threshold};
use rotbandit::{ArmId, HorizonConfig, Observation, Result, SeedSpec};

/// Forwards to an [`Env`] while recording every pull attempted on an arm
/// the policy itself withdrew.
pub struct Watch<'a> {
    pub env: &'a mut Env,
    pub discarded: HashSet<ArmId>,
    pub pulls_of_discarded: usize,
}

impl<'a> Watch<'a> {
    pub fn new(env: &'a mut Env) -> Self {
        Watch {
            env,
            discarded: HashSet::new(),
            pulls_of_discarded: 0,
        }
    }
}

impl Bandit for Watch<'_> {
    fn horizon(&self) -> u64 {
        self.env.horizon()
    }

    fn next_step(&self) -> u64 {
        self.env.next_step()
    }

    fn new_arm(&mut self) -> ArmId {
        self.env.new_arm()
    }

    fn discard(&mut self, arm: ArmId) -> Result<()> {
        self.discarded.insert(arm);
        self.env.discard(arm)
    }

    fn pull(&mut self, arm: ArmId) -> Result<Observation> {
        if self.discarded.contains(&arm) {
            self.pulls_of_discarded += 1;
        }
        self.env.pull(arm)
    }
}

pub fn all_policies(horizon: u64, adversary: &AdversarySpec) -> Vec<PolicySpec> {
    vec![
        PolicySpec::Alg1 {
            threshold: Threshold::Tuned {
                c1: 0.5,
                beta: 1.0,
                v_budget: adversary.v_budget,
                s_budget: adversary.s_budget,
            },
        },
        PolicySpec::Alg2 {
            block_len: None,
            c1: 0.5,
            rescale: 10.0,
        },
        PolicySpec::UcbTp {
            rho_max: adversary.max_rate(horizon),
            delta: None,
        },
        PolicySpec::Ssucb { subsample: None },
        PolicySpec::FreshArm,
    ]
}

/// Runs one trial directly against the environment.
pub fn simulate(
    spec: &PolicySpec,
    horizon: u64,
    beta: f64,
    seed: SeedSpec,
    adversary: AdversarySpec,
    noise: bool,
) -> Env {
    let cfg = HorizonConfig::new(horizon, beta, horizon.min(100)).unwrap();
    let mut env = Env::new(cfg, seed, adversary, noise).unwrap();
    let mut policy = spec.build(horizon, make_stream(seed, POLICY_STREAM)).unwrap();
    run_to_horizon(policy.as_mut(), &mut env).unwrap();
    env
}

/// Minimal harness config with the given adversary table and policy tables.
pub fn config_text(horizons: &str, n_seeds: u64, adversary: &str, policies: &[&str]) -> String {
    let mut s = format!(
        "horizons = {horizons}\nbeta = 1.0\nn_seeds = {n_seeds}\nmaster_seed = 3\n\
         output_dir = \"unused\"\ncheckpoint_stride = 50\n\n[adversary]\n{adversary}\n"
    );
    for p in policies {
        s.push_str(&format!("\n[[policy]]\n{p}\n"));
    }
    s
}

//! Experiment configuration.
//!
//! Configs are TOML files with top-level scalars, one `[adversary]` table
//! and one `[[policy]]` table per policy. The schema is documented in the
//! README; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adversary::{AdversaryKind, AdversarySpec, CapSchedule};
use crate::common::HorizonConfig;
use crate::error::{Error, Result};
use crate::policies::{PolicySpec, Threshold, DEFAULT_C1, DEFAULT_RESCALE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub horizons: Vec<u64>,
    pub beta: f64,
    pub n_seeds: u64,
    pub master_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub checkpoint_stride: u64,
    #[serde(default = "default_true")]
    pub noise: bool,
    #[serde(default = "default_true")]
    pub event_logs: bool,
    pub adversary: RawAdversary,
    #[serde(default, rename = "policy")]
    pub policies: Vec<RawPolicy>,
}

fn default_true() -> bool {
    true
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAdversary {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPolicy {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    /// Whether the tuned threshold may read the adversary's budgets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub use_adversary_budgets: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_s: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_len: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rescale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsample: Option<u64>,
}

/// A policy of the experiment, before the horizon is fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyEntry {
    pub label: String,
    raw: RawPolicy,
}

impl PolicyEntry {
    pub fn name(&self) -> &str {
        &self.raw.name
    }
}

/// Validated experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub horizons: Vec<u64>,
    pub beta: f64,
    pub policies: Vec<PolicyEntry>,
    pub n_seeds: u64,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    pub checkpoint_stride: u64,
    pub noise: bool,
    pub event_logs: bool,
    raw: RawConfig,
}

const POLICY_NAMES: [&str; 5] = ["alg1", "alg2", "ucb_tp", "ssucb", "fresh_arm"];
const ADVERSARY_KINDS: [&str; 6] = [
    "none",
    "slow_constant",
    "slow_harmonic",
    "per_arm_exponential",
    "abrupt_drop",
    "constrained_adaptive",
];

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Self> {
        let cfg = |msg: String| Error::Config(msg);
        if raw.horizons.is_empty() {
            return Err(cfg("horizons must not be empty".into()));
        }
        if raw.n_seeds < 1 {
            return Err(cfg("n_seeds must be >= 1".into()));
        }
        if raw.policies.is_empty() {
            return Err(cfg("at least one [[policy]] is required".into()));
        }
        for &h in &raw.horizons {
            HorizonConfig::new(h, raw.beta, raw.checkpoint_stride)?;
        }
        if !ADVERSARY_KINDS.contains(&raw.adversary.kind.as_str()) {
            return Err(cfg(format!("unknown adversary kind {:?}", raw.adversary.kind)));
        }
        let mut policies = Vec::new();
        for p in &raw.policies {
            if !POLICY_NAMES.contains(&p.name.as_str()) {
                return Err(cfg(format!("unknown policy {:?}", p.name)));
            }
            let label = p.label.clone().unwrap_or_else(|| p.name.clone());
            if label.is_empty()
                || !label
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
            {
                return Err(cfg(format!("policy label {label:?} must be [A-Za-z0-9_.-]+")));
            }
            if policies.iter().any(|e: &PolicyEntry| e.label == label) {
                return Err(cfg(format!("duplicate policy label {label:?}")));
            }
            policies.push(PolicyEntry {
                label,
                raw: p.clone(),
            });
        }
        let config = ExperimentConfig {
            horizons: raw.horizons.clone(),
            beta: raw.beta,
            policies,
            n_seeds: raw.n_seeds,
            master_seed: raw.master_seed,
            output_dir: raw.output_dir.clone(),
            checkpoint_stride: raw.checkpoint_stride,
            noise: raw.noise,
            event_logs: raw.event_logs,
            raw,
        };
        // Resolve everything once so config errors surface before any trial.
        for &h in &config.horizons {
            let adversary = config.adversary_for(h)?;
            for entry in &config.policies {
                config.policy_for(entry, h, &adversary)?;
            }
        }
        Ok(config)
    }

    pub fn with_overrides(mut self, output_dir: Option<PathBuf>, n_seeds: Option<u64>) -> Result<Self> {
        if let Some(dir) = output_dir {
            self.raw.output_dir = dir;
        }
        if let Some(n) = n_seeds {
            self.raw.n_seeds = n;
        }
        Self::from_raw(self.raw)
    }

    /// The effective configuration as TOML, as written next to the results.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.raw).expect("config serialises")
    }

    pub fn horizon_config(&self, horizon: u64) -> Result<HorizonConfig> {
        HorizonConfig::new(horizon, self.beta, self.checkpoint_stride)
    }

    pub fn adversary_for(&self, horizon: u64) -> Result<AdversarySpec> {
        let a = &self.raw.adversary;
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| Error::Config(format!("adversary {} needs `{key}`", a.kind)))
        };
        let kind = match a.kind.as_str() {
            "none" => AdversaryKind::None,
            "slow_constant" => AdversaryKind::SlowConstant,
            "slow_harmonic" => AdversaryKind::SlowHarmonic,
            "per_arm_exponential" => AdversaryKind::PerArmExponential {
                decay: need(a.decay, "decay")?,
            },
            "abrupt_drop" => AdversaryKind::AbruptDrop {
                gamma: need(a.gamma, "gamma")?,
            },
            "constrained_adaptive" => {
                let caps = match (a.cap, &a.caps) {
                    (Some(c), None) => CapSchedule::Constant(c),
                    (None, Some(cs)) => CapSchedule::Steps(cs.clone()),
                    _ => {
                        return Err(Error::Config(
                            "constrained_adaptive needs exactly one of `cap` or `caps`".into(),
                        ))
                    }
                };
                AdversaryKind::ConstrainedAdaptive { caps }
            }
            other => return Err(Error::Config(format!("unknown adversary kind {other:?}"))),
        };
        let v_budget = match (&kind, a.v_budget) {
            (AdversaryKind::SlowHarmonic, None) => Some(crate::adversary::harmonic_total(horizon)),
            (_, v) => v,
        };
        let spec = AdversarySpec {
            kind,
            v_budget,
            s_budget: a.s_budget,
        };
        spec.validate(horizon)?;
        Ok(spec)
    }

    pub fn policy_for(&self, entry: &PolicyEntry, horizon: u64, adversary: &AdversarySpec) -> Result<PolicySpec> {
        let p = &entry.raw;
        let c1 = p.c1.unwrap_or(DEFAULT_C1);
        let spec = match p.name.as_str() {
            "alg1" => {
                let threshold = match p.delta {
                    Some(d) => Threshold::Fixed(d),
                    None => {
                        let from_adv = p.use_adversary_budgets.unwrap_or(true);
                        Threshold::Tuned {
                            c1,
                            beta: p.known_beta.unwrap_or(self.beta),
                            v_budget: p.known_v.or(if from_adv { adversary.v_budget } else { None }),
                            s_budget: p.known_s.or(if from_adv { adversary.s_budget } else { None }),
                        }
                    }
                };
                PolicySpec::Alg1 { threshold }
            }
            "alg2" => PolicySpec::Alg2 {
                block_len: p.block_len,
                c1,
                rescale: p.rescale.unwrap_or(DEFAULT_RESCALE),
            },
            "ucb_tp" => PolicySpec::UcbTp {
                rho_max: p.rho_max.unwrap_or_else(|| adversary.max_rate(horizon)),
                delta: p.delta,
            },
            "ssucb" => PolicySpec::Ssucb {
                subsample: p.subsample,
            },
            "fresh_arm" => PolicySpec::FreshArm,
            other => return Err(Error::Config(format!("unknown policy {other:?}"))),
        };
        // Building validates every parameter; the stream is a throwaway.
        let probe = crate::common::make_stream(crate::common::SeedSpec::new(0, 0), "validate");
        spec.build(horizon, probe)
            .map_err(|e| Error::Config(format!("policy {}: {e}", entry.label)))?;
        Ok(spec)
    }
}

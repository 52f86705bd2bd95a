//! Rotting adversaries.
//!
//! After every pull at step `t < T` the adversary picks a rate `ρ_t ≥ 0` that
//! is subtracted from the pulled arm's mean. Budgets are enforced by
//! clipping, so the cumulative constraints hold mechanically whatever the
//! strategy asks for:
//!
//! - slow rotting: `Σ ρ_t ≤ V_T` (and always `Σ ρ_t ≤ T`);
//! - abrupt rotting: `1 + #{t : ρ_t ≠ 0} ≤ S_T`.
//!
//! Every applied nonzero rate is appended to an event log which can be
//! written as `t,arm_id,rho` lines and audited after the trial.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::common::ArmId;
use crate::error::{Error, Result};

/// Per-step upper bounds `ϱ_t` for the constrained adaptive adversary.
#[derive(Debug, Clone, PartialEq)]
pub enum CapSchedule {
    Constant(f64),
    /// `caps[t - 1]` bounds step `t`; steps past the end are capped at zero.
    Steps(Vec<f64>),
}

impl CapSchedule {
    pub fn cap(&self, t: u64) -> f64 {
        match self {
            CapSchedule::Constant(c) => *c,
            CapSchedule::Steps(caps) => caps.get((t - 1) as usize).copied().unwrap_or(0.0),
        }
    }

    fn max(&self) -> f64 {
        match self {
            CapSchedule::Constant(c) => *c,
            CapSchedule::Steps(caps) => caps.iter().copied().fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AdversaryKind {
    None,
    /// `ρ_t = V_T / (T − 1)` on every step.
    SlowConstant,
    /// `ρ_t = 1 / (t ln T)`.
    SlowHarmonic,
    /// `ρ_t = μ_t(a) · decay`.
    PerArmExponential { decay: f64 },
    /// Drops a pulled arm above `1 − γ` to exactly `1 − γ`, spending the
    /// first `S_T − 1` events greedily.
    AbruptDrop { gamma: f64 },
    /// Spends the per-step cap fully: `ρ_t = ϱ_t`.
    ConstrainedAdaptive { caps: CapSchedule },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversarySpec {
    pub kind: AdversaryKind,
    pub v_budget: Option<f64>,
    pub s_budget: Option<u64>,
}

impl AdversarySpec {
    pub fn none() -> Self {
        AdversarySpec {
            kind: AdversaryKind::None,
            v_budget: None,
            s_budget: None,
        }
    }

    pub fn slow_constant(v_budget: f64) -> Self {
        AdversarySpec {
            kind: AdversaryKind::SlowConstant,
            v_budget: Some(v_budget),
            s_budget: None,
        }
    }

    /// Harmonic rotting with the budget set to its exact total over `T`.
    pub fn slow_harmonic(horizon: u64) -> Self {
        AdversarySpec {
            kind: AdversaryKind::SlowHarmonic,
            v_budget: Some(harmonic_total(horizon)),
            s_budget: None,
        }
    }

    pub fn abrupt_drop(gamma: f64, s_budget: u64) -> Self {
        AdversarySpec {
            kind: AdversaryKind::AbruptDrop { gamma },
            v_budget: None,
            s_budget: Some(s_budget),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            AdversaryKind::None => "none",
            AdversaryKind::SlowConstant => "slow_constant",
            AdversaryKind::SlowHarmonic => "slow_harmonic",
            AdversaryKind::PerArmExponential { .. } => "per_arm_exponential",
            AdversaryKind::AbruptDrop { .. } => "abrupt_drop",
            AdversaryKind::ConstrainedAdaptive { .. } => "constrained_adaptive",
        }
    }

    pub fn validate(&self, horizon: u64) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("adversary {}: {msg}", self.name())));
        if let Some(v) = self.v_budget {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("v_budget must be a finite value >= 0, got {v}"));
            }
        }
        if let Some(s) = self.s_budget {
            if s < 1 || s > horizon {
                return bad(format!("s_budget must lie in [1, {horizon}], got {s}"));
            }
        }
        if self.kind != AdversaryKind::None && self.v_budget.is_none() && self.s_budget.is_none() {
            return bad("at least one of v_budget or s_budget must be set".into());
        }
        match &self.kind {
            AdversaryKind::SlowConstant => match self.v_budget {
                None => return bad("slow_constant needs v_budget".into()),
                Some(v) if v > horizon as f64 => {
                    return bad(format!("v_budget {v} exceeds T = {horizon}"))
                }
                _ => {}
            },
            AdversaryKind::PerArmExponential { decay } if !(0.0..=1.0).contains(decay) => {
                return bad(format!("decay must lie in [0, 1], got {decay}"));
            }
            AdversaryKind::AbruptDrop { gamma } => {
                if !(*gamma > 0.0 && *gamma < 1.0) {
                    return bad(format!("gamma must lie in (0, 1), got {gamma}"));
                }
                if self.s_budget.is_none() {
                    return bad("abrupt_drop needs s_budget".into());
                }
            }
            AdversaryKind::ConstrainedAdaptive { caps } => {
                let ok = match caps {
                    CapSchedule::Constant(c) => *c >= 0.0 && c.is_finite(),
                    CapSchedule::Steps(cs) => cs.iter().all(|c| *c >= 0.0 && c.is_finite()),
                };
                if !ok {
                    return bad("caps must be finite and >= 0".into());
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Largest per-step rate this strategy can request over horizon `T`.
    pub fn max_rate(&self, horizon: u64) -> f64 {
        match &self.kind {
            AdversaryKind::None => 0.0,
            AdversaryKind::SlowConstant => self.v_budget.unwrap_or(0.0) / (horizon - 1) as f64,
            AdversaryKind::SlowHarmonic => 1.0 / (horizon as f64).ln(),
            AdversaryKind::PerArmExponential { decay } => *decay,
            AdversaryKind::AbruptDrop { .. } => 1.0,
            AdversaryKind::ConstrainedAdaptive { caps } => caps.max(),
        }
    }
}

impl fmt::Display for AdversarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn harmonic_rate(t: u64, log_horizon: f64) -> f64 {
    1.0 / (t as f64 * log_horizon)
}

/// `Σ_{t=1}^{T−1} 1/(t ln T)`, summed in step order.
pub fn harmonic_total(horizon: u64) -> f64 {
    let log_horizon = (horizon as f64).ln();
    (1..horizon).map(|t| harmonic_rate(t, log_horizon)).sum()
}

/// What the adversary may look at when choosing a rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulledArm {
    pub id: ArmId,
    pub mu_initial: f64,
    pub mu_current: f64,
    pub pulls: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotEvent {
    pub t: u64,
    pub arm: ArmId,
    pub rho: f64,
}

/// Recorded whenever clipping changed a requested rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClipWarning {
    pub t: u64,
    pub arm: ArmId,
    pub requested: f64,
    pub applied: f64,
}

#[derive(Debug, Clone)]
pub struct AdversaryState {
    spec: AdversarySpec,
    horizon: u64,
    log_horizon: f64,
    v_spent: f64,
    rot_events: u64,
    events: Vec<RotEvent>,
    warnings: Vec<ClipWarning>,
}

impl AdversaryState {
    pub fn new(spec: AdversarySpec, horizon: u64) -> Result<Self> {
        spec.validate(horizon)?;
        Ok(AdversaryState {
            spec,
            horizon,
            log_horizon: (horizon as f64).ln(),
            v_spent: 0.0,
            rot_events: 0,
            events: Vec::new(),
            warnings: Vec::new(),
        })
    }

    pub fn spec(&self) -> &AdversarySpec {
        &self.spec
    }

    pub fn v_spent(&self) -> f64 {
        self.v_spent
    }

    pub fn rot_events(&self) -> u64 {
        self.rot_events
    }

    pub fn events(&self) -> &[RotEvent] {
        &self.events
    }

    pub fn warnings(&self) -> &[ClipWarning] {
        &self.warnings
    }

    fn requested(&self, t: u64, pulled: &PulledArm) -> f64 {
        match &self.spec.kind {
            AdversaryKind::None => 0.0,
            AdversaryKind::SlowConstant => {
                self.spec.v_budget.unwrap_or(0.0) / (self.horizon - 1) as f64
            }
            AdversaryKind::SlowHarmonic => harmonic_rate(t, self.log_horizon),
            AdversaryKind::PerArmExponential { decay } => (pulled.mu_current * decay).max(0.0),
            AdversaryKind::AbruptDrop { gamma } => {
                let floor = 1.0 - gamma;
                let allowed = self.spec.s_budget.map_or(u64::MAX, |s| s - 1);
                if pulled.mu_current > floor && self.rot_events < allowed {
                    pulled.mu_current - floor
                } else {
                    0.0
                }
            }
            AdversaryKind::ConstrainedAdaptive { caps } => caps.cap(t),
        }
    }

    /// Chooses, clips and logs `ρ_t` for the arm pulled at step `t`.
    ///
    /// Steps outside `[1, T − 1]` never rot.
    pub fn rot(&mut self, t: u64, pulled: &PulledArm) -> f64 {
        if t == 0 || t >= self.horizon {
            return 0.0;
        }
        let requested = self.requested(t, pulled);
        let mut rho = requested;
        let total_cap = self
            .spec
            .v_budget
            .map_or(self.horizon as f64, |v| v.min(self.horizon as f64));
        let remaining = (total_cap - self.v_spent).max(0.0);
        // Rounding of the running total must not count as clipping.
        if rho > remaining + 1e-12 * total_cap.max(1.0) {
            rho = remaining;
        }
        if rho > 0.0 {
            if let Some(s) = self.spec.s_budget {
                if 1 + self.rot_events + 1 > s {
                    rho = 0.0;
                }
            }
        }
        if rho != requested {
            self.warnings.push(ClipWarning {
                t,
                arm: pulled.id,
                requested,
                applied: rho,
            });
        }
        if rho > 0.0 {
            self.v_spent += rho;
            self.rot_events += 1;
            self.events.push(RotEvent {
                t,
                arm: pulled.id,
                rho,
            });
        }
        rho
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintCheck {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub total: f64,
    pub nonzero_events: u64,
    pub checks: Vec<ConstraintCheck>,
}

impl AuditReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Re-derives every declared budget constraint from an event log.
///
/// `block_len`, when given, also checks `Σ_{t ∈ block i} ρ_t ≤ H` for each
/// block of `H` consecutive steps.
pub fn audit(
    events: &[RotEvent],
    spec: &AdversarySpec,
    horizon: u64,
    block_len: Option<u64>,
) -> AuditReport {
    let total: f64 = events.iter().map(|e| e.rho).sum();
    let nonzero = events.iter().filter(|e| e.rho != 0.0).count() as u64;
    let mut checks = Vec::new();
    // Tolerance for summation-order differences against the running total.
    let slack = |limit: f64| limit * 1e-12 + 1e-12;
    checks.push(ConstraintCheck {
        name: "nonnegative".into(),
        pass: events.iter().all(|e| e.rho >= 0.0),
        measured: events.iter().map(|e| e.rho).fold(0.0, f64::min),
        limit: 0.0,
    });
    checks.push(ConstraintCheck {
        name: "in_horizon".into(),
        pass: events.iter().all(|e| e.t >= 1 && e.t < horizon),
        measured: events.iter().map(|e| e.t).max().unwrap_or(0) as f64,
        limit: (horizon - 1) as f64,
    });
    if let Some(v) = spec.v_budget {
        checks.push(ConstraintCheck {
            name: "v_budget".into(),
            pass: total <= v + slack(v),
            measured: total,
            limit: v,
        });
    }
    let t_cap = horizon as f64;
    checks.push(ConstraintCheck {
        name: "total_le_T".into(),
        pass: total <= t_cap + slack(t_cap),
        measured: total,
        limit: t_cap,
    });
    if let Some(s) = spec.s_budget {
        checks.push(ConstraintCheck {
            name: "s_budget".into(),
            pass: 1 + nonzero <= s,
            measured: (1 + nonzero) as f64,
            limit: s as f64,
        });
    }
    if let Some(h) = block_len.filter(|h| *h > 0) {
        let blocks = horizon.div_ceil(h) as usize;
        let mut sums = vec![0.0; blocks];
        for e in events {
            if e.t >= 1 {
                let i = ((e.t - 1) / h) as usize;
                if i < blocks {
                    sums[i] += e.rho;
                }
            }
        }
        let worst = sums.iter().copied().fold(0.0, f64::max);
        let hf = h as f64;
        checks.push(ConstraintCheck {
            name: "block_sum_le_H".into(),
            pass: worst <= hf + slack(hf),
            measured: worst,
            limit: hf,
        });
    }
    AuditReport {
        total,
        nonzero_events: nonzero,
        checks,
    }
}

pub fn write_events<W: Write>(mut w: W, events: &[RotEvent]) -> std::io::Result<()> {
    for e in events {
        writeln!(w, "{},{},{:?}", e.t, e.arm.0, e.rho)?;
    }
    Ok(())
}

pub fn read_events<R: BufRead>(r: R, path: &Path) -> Result<Vec<RotEvent>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let mut parts = line.split(',');
        let (Some(t), Some(arm), Some(rho), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(parse_err(format!("expected t,arm_id,rho, got {line:?}")));
        };
        out.push(RotEvent {
            t: t.parse().map_err(|e| parse_err(format!("bad t: {e}")))?,
            arm: ArmId(arm.parse().map_err(|e| parse_err(format!("bad arm_id: {e}")))?),
            rho: rho.parse().map_err(|e| parse_err(format!("bad rho: {e}")))?,
        });
    }
    Ok(out)
}

//! Lazy sampling of the infinite arm pool.
//!
//! Initial gaps `Δ = 1 − μ_1` follow the exact law `P(Δ < x) = x^β` on
//! `[0, 1]`, drawn by inversion: `Δ = u^(1/β)` for uniform `u`. Arms are only
//! materialised when a policy asks for a new one.

use crate::common::{ArmId, Stream};
use crate::error::{Error, Result};

/// One arm of the reservoir together with its hidden bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmRecord {
    pub id: ArmId,
    pub mu_initial: f64,
    /// Current mean; may become negative after rotting.
    pub mu_current: f64,
    pub pulls: u64,
    /// Step at which the current run of this arm starts.
    pub run_start: u64,
    pub discarded: bool,
}

impl ArmRecord {
    pub fn gap(&self) -> f64 {
        1.0 - self.mu_current
    }
}

/// Quantile function of the gap law `P(Δ < x) = x^β`.
pub fn inverse_cdf_delta(u: f64, beta: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("u must lie in (0, 1), got {u}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta must be > 0, got {beta}")));
    }
    Ok(u.powf(1.0 / beta))
}

/// Per-trial arm pool. Identifiers are never reused.
#[derive(Debug, Clone)]
pub struct Reservoir {
    stream: Stream,
    beta: f64,
    next_id: u64,
}

impl Reservoir {
    pub fn new(stream: Stream, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("beta must be > 0, got {beta}")));
        }
        Ok(Reservoir {
            stream,
            beta,
            next_id: 0,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Number of arms materialised so far.
    pub fn sampled(&self) -> u64 {
        self.next_id
    }

    pub fn sample_arm(&mut self) -> ArmRecord {
        let u = self.stream.uniform_open();
        // u is in (0, 1) and beta was validated at construction.
        let delta = u.powf(1.0 / self.beta);
        let id = ArmId(self.next_id);
        self.next_id += 1;
        ArmRecord {
            id,
            mu_initial: 1.0 - delta,
            mu_current: 1.0 - delta,
            pulls: 0,
            run_start: 0,
            discarded: false,
        }
    }
}

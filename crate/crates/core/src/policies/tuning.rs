//! Threshold tuning from known problem parameters.

use crate::error::{Error, Result};

fn check_common(beta: f64, horizon: u64, c1: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Domain(format!("beta must be > 0, got {beta}")));
    }
    if horizon < 2 {
        return Err(Error::Domain(format!("horizon must be >= 2, got {horizon}")));
    }
    if !(c1 > 0.0 && c1 < 1.0) {
        return Err(Error::Domain(format!("c1 must lie in (0, 1), got {c1}")));
    }
    Ok(())
}

/// Threshold for slow rotting with total budget `V_T`.
///
/// `c1 · max{(V_T/T)^(1/(β+2)), T^(−1/(β+1))}` for `β ≥ 1` and
/// `c1 · max{(V_T/T)^(1/3), T^(−1/2)}` for `0 < β < 1`.
pub fn delta_v(beta: f64, v_budget: f64, horizon: u64, c1: f64) -> Result<f64> {
    check_common(beta, horizon, c1)?;
    let t = horizon as f64;
    if !(v_budget >= 0.0) || v_budget > t {
        return Err(Error::Domain(format!("V_T must lie in [0, T = {horizon}], got {v_budget}")));
    }
    let ratio = v_budget / t;
    let value = if beta >= 1.0 {
        ratio.powf(1.0 / (beta + 2.0)).max(t.powf(-1.0 / (beta + 1.0)))
    } else {
        ratio.cbrt().max(t.powf(-0.5))
    };
    Ok(c1 * value)
}

/// Threshold for abrupt rotting with at most `S_T − 1` rotting events.
///
/// `c1 · (S_T/T)^(1/(β+1))` for `β ≥ 1` and `c1 · (S_T/T)^(1/2)` for
/// `0 < β ≤ 1`.
pub fn delta_s(beta: f64, s_budget: u64, horizon: u64, c1: f64) -> Result<f64> {
    check_common(beta, horizon, c1)?;
    if s_budget < 1 || s_budget > horizon {
        return Err(Error::Domain(format!("S_T must lie in [1, T = {horizon}], got {s_budget}")));
    }
    let ratio = s_budget as f64 / horizon as f64;
    let value = if beta > 1.0 {
        ratio.powf(1.0 / (beta + 1.0))
    } else {
        ratio.sqrt()
    };
    Ok(c1 * value)
}

/// `min{δ_V, δ_S}` over whichever budgets are known. With neither known
/// the problem is treated as stationary (`V_T = 0`).
pub fn tuned_delta(
    beta: f64,
    v_budget: Option<f64>,
    s_budget: Option<u64>,
    horizon: u64,
    c1: f64,
) -> Result<f64> {
    let dv = match (v_budget, s_budget) {
        (None, None) => Some(delta_v(beta, 0.0, horizon, c1)?),
        (Some(v), _) => Some(delta_v(beta, v, horizon, c1)?),
        (None, Some(_)) => None,
    };
    let ds = s_budget.map(|s| delta_s(beta, s, horizon, c1)).transpose()?;
    Ok(match (dv, ds) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => unreachable!(),
    })
}

//! Log-log regret exponent fits.

use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub rss: f64,
    pub r2: f64,
    pub n_points: usize,
}

/// Least-squares fit of `ln y = intercept + slope · ln x`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::Domain(format!(
            "exponent fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points.iter().find(|&&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::Domain(format!("non-positive point ({x}, {y}) in log-log fit")));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("exponent fit needs at least two distinct x".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - rss / syy };
    Ok(ExponentFit {
        slope,
        intercept,
        rss,
        r2,
        n_points: points.len(),
    })
}

/// One row of `curves.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRow {
    pub policy: String,
    pub horizon: u64,
    pub t: u64,
    pub mean_regret: f64,
    pub std_regret: f64,
}

pub const CURVES_HEADER: &str = "policy,T,t,mean_regret,std_regret";

pub fn read_curves<R: BufRead>(r: R, path: &Path) -> Result<Vec<CurveRow>> {
    let mut rows = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        if i == 0 {
            if line.trim() != CURVES_HEADER {
                return Err(err(format!("expected header {CURVES_HEADER:?}")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 5 {
            return Err(err(format!("expected 5 fields, got {}", f.len())));
        }
        rows.push(CurveRow {
            policy: f[0].to_string(),
            horizon: f[1].parse().map_err(|e| err(format!("bad T: {e}")))?,
            t: f[2].parse().map_err(|e| err(format!("bad t: {e}")))?,
            mean_regret: f[3].parse().map_err(|e| err(format!("bad mean: {e}")))?,
            std_regret: f[4].parse().map_err(|e| err(format!("bad std: {e}")))?,
        });
    }
    Ok(rows)
}

/// `(T, mean final regret)` for one policy, one point per horizon.
pub fn final_points(rows: &[CurveRow], policy: &str) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.policy == policy && r.t == r.horizon)
        .map(|r| (r.horizon as f64, r.mean_regret))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_power_law() {
        let pts: Vec<_> = [1e3, 1e4, 1e5].iter().map(|&x: &f64| (x, 3.0 * x.powf(0.6))).collect();
        let f = fit_exponent(&pts).unwrap();
        assert!((f.slope - 0.6).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-10);
        assert!(f.rss < 1e-20);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(fit_exponent(&[(1.0, 1.0), (2.0, 2.0)]), Err(Error::Domain(_))));
        assert!(matches!(
            fit_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 3.0)]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            fit_exponent(&[(-1.0, 1.0), (2.0, 1.0), (3.0, 3.0)]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn picks_final_checkpoints() {
        let text = format!("{CURVES_HEADER}\na,10,5,1.0,0.0\na,10,10,2.0,0.1\nb,10,10,9.0,0.0\na,20,20,4.0,0.0\n");
        let rows = read_curves(text.as_bytes(), Path::new("c.csv")).unwrap();
        assert_eq!(final_points(&rows, "a"), vec![(10.0, 2.0), (20.0, 4.0)]);
        assert!(read_curves("x,y\n".as_bytes(), Path::new("c.csv")).is_err());
    }
}

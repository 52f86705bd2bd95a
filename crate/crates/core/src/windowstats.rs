//! Statistics of the active arm's consecutive run.
//!
//! The threshold policy pulls one arm every step from `run_start` until it
//! is withdrawn, so a window `[s, t − 1]` of the run is a contiguous slice of
//! the reward sequence. Prefix sums answer any window mean in O(1) and the
//! doubling candidate set keeps each decision at O(log n) window queries.

use crate::error::{Error, Result};

/// Confidence constant of the window-UCB bonus `sqrt(12 ln(L) / n)`.
pub const CONFIDENCE: f64 = 12.0;

#[derive(Debug, Clone)]
pub struct RunStats {
    run_start: u64,
    prefix: Vec<f64>,
}

impl RunStats {
    pub fn new(run_start: u64) -> Self {
        RunStats {
            run_start,
            prefix: vec![0.0],
        }
    }

    /// Starts a new run, keeping the allocation.
    pub fn reset(&mut self, run_start: u64) {
        self.run_start = run_start;
        self.prefix.clear();
        self.prefix.push(0.0);
    }

    pub fn run_start(&self) -> u64 {
        self.run_start
    }

    pub fn count(&self) -> u64 {
        (self.prefix.len() - 1) as u64
    }

    pub fn prefix_sums(&self) -> &[f64] {
        &self.prefix
    }

    pub fn record(&mut self, reward: f64) {
        let last = *self.prefix.last().expect("prefix starts with 0");
        self.prefix.push(last + reward);
    }

    /// Sum of rewards observed at steps `s..=e`.
    pub fn interval_sum(&self, s: u64, e: u64) -> f64 {
        let lo = (s - self.run_start) as usize;
        let hi = (e - self.run_start + 1) as usize;
        self.prefix[hi] - self.prefix[lo]
    }

    /// `WUCB(s, t − 1) = mean[s, t − 1] + sqrt(12 ln(log_arg) / n)`.
    pub fn wucb(&self, s: u64, t_minus_1: u64, log_arg: f64) -> Result<f64> {
        let end = self.run_start + self.count();
        if s < self.run_start || s > t_minus_1 || t_minus_1 >= end {
            return Err(Error::Contract(format!(
                "window [{s}, {t_minus_1}] outside run [{}, {})",
                self.run_start, end
            )));
        }
        if !(log_arg > 1.0) {
            return Err(Error::Domain(format!("log argument must exceed 1, got {log_arg}")));
        }
        Ok(self.wucb_unchecked(s, t_minus_1, log_arg.ln()))
    }

    #[inline]
    fn wucb_unchecked(&self, s: u64, t_minus_1: u64, ln_arg: f64) -> f64 {
        let n = (t_minus_1 - s + 1) as f64;
        self.interval_sum(s, t_minus_1) / n + (CONFIDENCE * ln_arg / n).sqrt()
    }

    /// Minimum window-UCB over the doubling candidate starts at step `t`.
    ///
    /// Requires `t = run_start + count` with at least one pull in the run.
    pub fn min_wucb(&self, t: u64, log_arg: f64) -> f64 {
        debug_assert!(self.count() >= 1);
        debug_assert_eq!(t, self.run_start + self.count());
        let ln_arg = log_arg.ln();
        let mut best = f64::INFINITY;
        for s in CandidateStarts::new(t, self.run_start) {
            best = best.min(self.wucb_unchecked(s, t - 1, ln_arg));
        }
        best
    }
}

/// Iterator over `{s : run_start ≤ s ≤ t − 1, s = t − 2^(i−1)}`, in
/// decreasing order of `s`.
#[derive(Debug, Clone)]
pub struct CandidateStarts {
    t: u64,
    run_start: u64,
    len: u64,
}

impl CandidateStarts {
    pub fn new(t: u64, run_start: u64) -> Self {
        CandidateStarts { t, run_start, len: 1 }
    }
}

impl Iterator for CandidateStarts {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.len > self.t.saturating_sub(self.run_start) {
            return None;
        }
        let s = self.t - self.len;
        self.len = self.len.saturating_mul(2);
        Some(s)
    }
}

pub fn candidate_starts(t: u64, run_start: u64) -> Vec<u64> {
    CandidateStarts::new(t, run_start).collect()
}

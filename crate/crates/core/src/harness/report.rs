//! Per-`n_α` summaries of a sweep next to the theoretical rate.

use serde::{Deserialize, Serialize};

use super::sweep::RunRecord;
use crate::bounds::{rate_schedule, RATE_MIN_N_ALPHA};
use crate::error::{Error, Result};

/// Dimensions and output bound entering the rate schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateInputs {
    pub d_w: usize,
    pub d_u: usize,
    pub d_v: usize,
    pub beta_v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub n_alpha: usize,
    pub runs: usize,
    pub failed: usize,
    pub median: Option<f64>,
    pub q1: Option<f64>,
    pub q3: Option<f64>,
    pub iqr: Option<f64>,
    /// `4ε²` of the rate schedule; absent below `n_α = e^e`.
    pub rate: Option<f64>,
    pub rate_eps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub entries: Vec<ReportEntry>,
    pub rate_inputs: RateInputs,
    pub note: String,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo]))
}

pub fn emit_report(records: &[RunRecord], inputs: &RateInputs) -> Result<Report> {
    if records.is_empty() {
        return Err(Error::Config("cannot report on an empty sweep".into()));
    }
    let mut grid: Vec<usize> = records.iter().map(|r| r.n_alpha).collect();
    grid.sort_unstable();
    grid.dedup();
    let entries = grid
        .into_iter()
        .map(|n| {
            let runs: Vec<&RunRecord> = records.iter().filter(|r| r.n_alpha == n).collect();
            let mut errs: Vec<f64> = runs.iter().filter_map(|r| r.test_error).collect();
            errs.sort_by(f64::total_cmp);
            let (q1, q3) = (quantile(&errs, 0.25), quantile(&errs, 0.75));
            let sched = (n as f64 > RATE_MIN_N_ALPHA)
                .then(|| rate_schedule(n as f64, inputs.d_w, inputs.d_u, inputs.d_v, inputs.beta_v).ok())
                .flatten();
            ReportEntry {
                n_alpha: n,
                runs: runs.len(),
                failed: runs.iter().filter(|r| !r.ok()).count(),
                median: quantile(&errs, 0.5),
                q1,
                q3,
                iqr: q1.zip(q3).map(|(a, b)| b - a),
                rate: sched.map(|s| s.rate),
                rate_eps: sched.map(|s| s.eps),
            }
        })
        .collect();
    Ok(Report {
        entries,
        rate_inputs: *inputs,
        note: "rate uses unit constants; it is shown alongside the empirical medians, not as a bound on them".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.5), Some(2.5));
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.25), Some(2.0));
        assert_eq!(quantile(&[], 0.5), None);
    }
}

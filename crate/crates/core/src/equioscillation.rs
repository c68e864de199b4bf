//! Alternation diagnostics for an error curve.
//!
//! A type-`(n, m)` approximation with zero defect is best iff its error
//! attains the maximal deviation at `n + m + 2` points with alternating
//! signs. The defect is not estimated here, so a shortfall is reported as
//! inconclusive rather than suboptimal.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquioscillationError {
    #[error("error curve is empty")]
    EmptyCurve,
    #[error("error curve abscissae must be strictly increasing (index {0})")]
    NotIncreasing(usize),
    #[error("maximal deviation must be finite and nonnegative, got {0}")]
    InvalidDeviation(f64),
    #[error("peak tolerance must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    CertifiedOptimal,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub t: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquioscillationReport {
    /// Alternating extreme points in increasing `t`.
    pub peaks: Vec<Peak>,
    pub alternation_count: usize,
    pub required_count: usize,
    /// Smallest over largest peak magnitude; 1 when there are no peaks.
    pub uniformity: f64,
    pub verdict: Verdict,
}

pub const DEFAULT_PEAK_TOL: f64 = 0.05;

/// Runs of equal deviation: `(value, first index, last index)`.
fn plateaus(curve: &[(f64, f64)]) -> Vec<(f64, usize, usize)> {
    let mut runs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, &(_, e)) in curve.iter().enumerate() {
        match runs.last_mut() {
            Some(run) if run.0 == e => run.2 = i,
            _ => runs.push((e, i, i)),
        }
    }
    runs
}

/// Signed local extrema: maxima with positive value and minima with
/// negative value. Plateaus report their midpoint; the curve ends count as
/// extrema when the neighbouring value is smaller in magnitude direction.
pub fn local_extrema(curve: &[(f64, f64)]) -> Vec<Peak> {
    let runs = plateaus(curve);
    let mut out = Vec::new();
    for (r, &(v, start, end)) in runs.iter().enumerate() {
        let prev = r.checked_sub(1).map(|p| runs[p].0);
        let next = runs.get(r + 1).map(|n| n.0);
        let is_max = prev.is_none_or(|p| p < v) && next.is_none_or(|n| n < v);
        let is_min = prev.is_none_or(|p| p > v) && next.is_none_or(|n| n > v);
        if (is_max && v > 0.0) || (is_min && v < 0.0) {
            let mid = (start + end) / 2;
            out.push(Peak { t: curve[mid].0, deviation: v });
        }
    }
    out
}

pub fn analyze(
    error_curve: &[(f64, f64)],
    n: usize,
    m: usize,
    z: f64,
    peak_tol: f64,
) -> Result<EquioscillationReport, EquioscillationError> {
    if error_curve.is_empty() {
        return Err(EquioscillationError::EmptyCurve);
    }
    if let Some(i) = (1..error_curve.len()).find(|&i| error_curve[i].0 <= error_curve[i - 1].0) {
        return Err(EquioscillationError::NotIncreasing(i));
    }
    if !(z >= 0.0 && z.is_finite()) {
        return Err(EquioscillationError::InvalidDeviation(z));
    }
    if !(peak_tol > 0.0 && peak_tol < 1.0) {
        return Err(EquioscillationError::InvalidTolerance(peak_tol));
    }
    let required_count = n + m + 2;
    if z == 0.0 || error_curve.iter().all(|&(_, e)| e == 0.0) {
        return Ok(EquioscillationReport {
            peaks: Vec::new(),
            alternation_count: 0,
            required_count,
            uniformity: 1.0,
            verdict: Verdict::CertifiedOptimal,
        });
    }

    let threshold = (1.0 - peak_tol) * z;
    // Longest alternating subsequence: keep the largest of each same-sign run.
    let mut peaks: Vec<Peak> = Vec::new();
    for p in local_extrema(error_curve).into_iter().filter(|p| p.deviation.abs() >= threshold) {
        match peaks.last_mut() {
            Some(last) if last.deviation.signum() == p.deviation.signum() => {
                if p.deviation.abs() > last.deviation.abs() {
                    *last = p;
                }
            }
            _ => peaks.push(p),
        }
    }
    let alternation_count = peaks.len();
    let (lo, hi) = peaks
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), p| (lo.min(p.deviation.abs()), hi.max(p.deviation.abs())));
    let uniformity = if peaks.is_empty() { 1.0 } else { lo / hi };
    let verdict = if alternation_count >= required_count { Verdict::CertifiedOptimal } else { Verdict::Inconclusive };
    Ok(EquioscillationReport { peaks, alternation_count, required_count, uniformity, verdict })
}

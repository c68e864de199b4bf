//! Rational amplitude times a sine: `f(t) ≈ (A·G(t) / B·H(t)) · sin(ωt + τ)`.
//!
//! The problem is not quasiconvex in `(ω, τ)`, so both are taken from finite
//! candidate sets and every pair gets its own bisection solve. For fixed
//! `(ω, τ)` the sine folds into the numerator basis.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::{BasisSpec, DenominatorFamily, NumeratorFamily};
use crate::minimax::{solve_minimax, ApproximationProblem, BisectionConfig, MinimaxError, RationalApproximant};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SineError {
    #[error("{0} candidates must be nonempty, finite and strictly increasing")]
    InvalidSpace(&'static str),
    #[error("all {probes} (omega, tau) probes failed; first error: {first}")]
    AllProbesFailed { probes: usize, first: MinimaxError },
    #[error(transparent)]
    Minimax(#[from] MinimaxError),
}

/// Which time coordinate `ω` multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeAxis {
    /// The unit coordinate `s ∈ [-1, 1]` of the interval map.
    #[default]
    Normalized,
    /// The original abscissae `t`.
    Native,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineSearchSpace {
    pub omegas: Vec<f64>,
    pub taus: Vec<f64>,
    pub time_axis: TimeAxis,
}

impl Default for SineSearchSpace {
    /// `ω ∈ {1, …, 15}`, `τ ∈ {0, π/4, π/2, 3π/4}`.
    fn default() -> Self {
        Self {
            omegas: (1..=15).map(f64::from).collect(),
            taus: vec![0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0],
            time_axis: TimeAxis::Normalized,
        }
    }
}

fn strictly_increasing(v: &[f64]) -> bool {
    !v.is_empty() && v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] < w[1])
}

impl SineSearchSpace {
    pub fn new(omegas: Vec<f64>, taus: Vec<f64>, time_axis: TimeAxis) -> Result<Self, SineError> {
        let space = Self { omegas, taus, time_axis };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<(), SineError> {
        if !strictly_increasing(&self.omegas) {
            return Err(SineError::InvalidSpace("omega"));
        }
        if !strictly_increasing(&self.taus) {
            return Err(SineError::InvalidSpace("tau"));
        }
        Ok(())
    }

    /// All `(ω, τ)` pairs, ω-major.
    pub fn probes(&self) -> Vec<(f64, f64)> {
        self.omegas.iter().flat_map(|&w| self.taus.iter().map(move |&t| (w, t))).collect()
    }

    pub fn len(&self) -> usize {
        self.omegas.len() * self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineProbe {
    pub omega: f64,
    pub tau: f64,
    /// `None` if the inner solve failed.
    pub z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SineFitResult {
    /// Inner solution at the selected pair. Its basis carries the frequency
    /// and phase in the unit coordinate.
    pub best: RationalApproximant,
    pub omega: f64,
    pub tau: f64,
    /// One entry per probe, ω-major.
    pub z_grid: Vec<SineProbe>,
}

/// Sine parameters acting on the unit coordinate for a probe `(ω, τ)`.
fn unit_sine(problem: &ApproximationProblem, axis: TimeAxis, omega: f64, tau: f64) -> (f64, f64) {
    match axis {
        TimeAxis::Normalized => (omega, tau),
        // ωt + τ = ω·h·s + (ω·c + τ) with t = c + h·s.
        TimeAxis::Native => {
            let map = problem.grid().interval_map();
            (omega * map.half_width(), omega * map.midpoint() + tau)
        }
    }
}

fn solve_probe(
    problem: &ApproximationProblem,
    axis: TimeAxis,
    (omega, tau): (f64, f64),
    config: &BisectionConfig,
) -> Result<RationalApproximant, MinimaxError> {
    let (n, m) = (problem.basis().n, problem.basis().m);
    let (w, phase) = unit_sine(problem, axis, omega, tau);
    let basis = BasisSpec {
        numerator: NumeratorFamily::SineModulatedMonomial { omega: w, tau: phase },
        denominator: DenominatorFamily::Monomial,
        n,
        m,
    };
    solve_minimax(&problem.with_basis(basis)?, config)
}

/// Exhaustive search over `space`. The numerator family of `problem` is
/// ignored; its degrees `n, m` are kept.
pub fn fit_sine_model(
    problem: &ApproximationProblem,
    space: &SineSearchSpace,
    config: &BisectionConfig,
) -> Result<SineFitResult, SineError> {
    fit_sine_model_ordered(problem, space, &space.probes(), config)
}

/// Like [`fit_sine_model`] but visits `order`, which must be a
/// permutation of `space.probes()`. The result does not depend on it.
pub fn fit_sine_model_ordered(
    problem: &ApproximationProblem,
    space: &SineSearchSpace,
    order: &[(f64, f64)],
    config: &BisectionConfig,
) -> Result<SineFitResult, SineError> {
    space.validate()?;
    config.validate()?;
    let outcomes: Vec<((f64, f64), Result<RationalApproximant, MinimaxError>)> =
        order.par_iter().map(|&pair| (pair, solve_probe(problem, space.time_axis, pair, config))).collect();

    let mut outcomes = outcomes;
    outcomes.sort_by(|a, b| a.0 .0.total_cmp(&b.0 .0).then(a.0 .1.total_cmp(&b.0 .1)));

    let zmin = outcomes.iter().filter_map(|(_, r)| r.as_ref().ok().map(|a| a.z)).fold(f64::INFINITY, f64::min);
    if !zmin.is_finite() {
        let first =
            outcomes.iter().find_map(|(_, r)| r.as_ref().err().cloned()).ok_or(SineError::InvalidSpace("probe"))?;
        return Err(SineError::AllProbesFailed { probes: outcomes.len(), first });
    }

    let z_grid = outcomes
        .iter()
        .map(|&((omega, tau), ref r)| SineProbe { omega, tau, z: r.as_ref().ok().map(|a| a.z) })
        .collect();
    // Outcomes are sorted, so the first within ε of the minimum has the
    // smallest (ω, τ).
    let (pick, best) = outcomes
        .into_iter()
        .find_map(|(pair, r)| r.ok().filter(|a| a.z <= zmin + config.epsilon).map(|a| (pair, a)))
        .expect("finite minimum has a witness");
    Ok(SineFitResult { best, omega: pick.0, tau: pick.1, z_grid })
}

//! Best uniform rational approximation on a grid by bisection on the
//! maximal deviation `z`.
//!
//! For a fixed level `z` the question "is there `(A, B)` with
//! `|f(t_i) - A·G(t_i)/B·H(t_i)| <= z` and `B·H(t_i) >= δ`?" is a linear
//! feasibility problem once both sides are multiplied by the positive
//! denominator. The LP below minimizes a common slack `θ` over
//!
//! ```text
//! (f_i - z)·B·H_i - A·G_i <= θ
//! A·G_i - (f_i + z)·B·H_i <= θ
//! -B·H_i                  <= -δ
//! ```
//!
//! and the level is feasible iff the optimal `θ` is (numerically) `<= 0`.
//! The objective is quasiconvex in `(A, B)`, so the feasible levels form a
//! half-line and bisection on `z` converges to the optimum.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::{Basis, BasisError, BasisSpec, IntervalMap};
use crate::grid::Grid;
use crate::lp::{self, LpConfig, LpError, LpProblem, LpSolution, LpStatus, Relation};
use crate::poly_minimax::{minimax_on_rows, PolyError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MinimaxError {
    #[error("{values} values for {nodes} grid nodes")]
    LengthMismatch { values: usize, nodes: usize },
    #[error("non-finite sample value at index {0}")]
    NonFinite(usize),
    #[error("grid has {nodes} nodes, need at least {required} = 10·(n+m+2)")]
    GridTooCoarse { nodes: usize, required: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("no feasible approximation at the initial upper bound {upper}; δ = {delta} may be too large")]
    NoFeasibleStart { upper: f64, delta: f64 },
    #[error("bisection did not converge within {iterations} iterations; bracket [{lower}, {upper}]")]
    MaxIterations { iterations: usize, lower: f64, upper: f64 },
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Basis(#[from] BasisError),
}

/// Sampled target with its basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximationProblem<B: Basis = BasisSpec> {
    grid: Grid,
    values: Vec<f64>,
    basis: B,
}

impl<B: Basis> ApproximationProblem<B> {
    pub fn new(grid: Grid, values: Vec<f64>, basis: B) -> Result<Self, MinimaxError> {
        if values.len() != grid.len() {
            return Err(MinimaxError::LengthMismatch { values: values.len(), nodes: grid.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(MinimaxError::NonFinite(i));
        }
        let required = 10 * (basis.numerator_len() + basis.denominator_len());
        if grid.len() < required {
            return Err(MinimaxError::GridTooCoarse { nodes: grid.len(), required });
        }
        Ok(Self { grid, values, basis })
    }

    /// Samples `f` at the grid nodes.
    pub fn from_fn(grid: Grid, basis: B, f: impl Fn(f64) -> f64) -> Result<Self, MinimaxError> {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self::new(grid, values, basis)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn basis(&self) -> &B {
        &self.basis
    }

    /// Same samples under a different basis.
    pub fn with_basis<C: Basis>(&self, basis: C) -> Result<ApproximationProblem<C>, MinimaxError> {
        ApproximationProblem::new(self.grid.clone(), self.values.clone(), basis)
    }

    /// `max_i |f(t_i) - A·G(t_i)/B·H(t_i)|`, the discretized objective.
    pub fn deviation(&self, a: &[f64], b: &[f64]) -> Result<f64, MinimaxError> {
        Design::new(self).deviation(a, b)
    }

    /// `min_i B·H(t_i)`.
    pub fn min_denominator(&self, b: &[f64]) -> f64 {
        Design::new(self).min_denominator(b)
    }

    /// Default denominator floor: `1e-6 · max|f|`, at least `1e-12`.
    pub fn default_delta(&self) -> f64 {
        (1e-6 * self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))).max(1e-12)
    }
}

/// Basis values at every unit node, computed once per problem.
pub(crate) struct Design<'p> {
    values: &'p [f64],
    g: Vec<f64>,
    h: Vec<f64>,
    k: usize,
    l: usize,
}

impl<'p> Design<'p> {
    pub(crate) fn new<B: Basis>(problem: &'p ApproximationProblem<B>) -> Self {
        let k = problem.basis.numerator_len();
        let l = problem.basis.denominator_len();
        let nodes = problem.grid.unit_nodes();
        let mut g = vec![0.0; nodes.len() * k];
        let mut h = vec![0.0; nodes.len() * l];
        for (i, &s) in nodes.iter().enumerate() {
            problem.basis.numerator_into(s, &mut g[i * k..(i + 1) * k]);
            problem.basis.denominator_into(s, &mut h[i * l..(i + 1) * l]);
        }
        Self { values: &problem.values, g, h, k, l }
    }

    fn len(&self) -> usize {
        self.values.len()
    }

    fn g(&self, i: usize) -> &[f64] {
        &self.g[i * self.k..(i + 1) * self.k]
    }

    fn h(&self, i: usize) -> &[f64] {
        &self.h[i * self.l..(i + 1) * self.l]
    }

    fn check_lengths(&self, a: &[f64], b: &[f64]) -> Result<(), MinimaxError> {
        if a.len() != self.k {
            return Err(BasisError::CoefficientCount { which: "numerator", expected: self.k, found: a.len() }.into());
        }
        if b.len() != self.l {
            return Err(BasisError::CoefficientCount { which: "denominator", expected: self.l, found: b.len() }.into());
        }
        Ok(())
    }

    fn deviation(&self, a: &[f64], b: &[f64]) -> Result<f64, MinimaxError> {
        self.check_lengths(a, b)?;
        let mut worst = 0.0_f64;
        for i in 0..self.len() {
            let num = dot(a, self.g(i));
            let den = dot(b, self.h(i));
            if den == 0.0 {
                return Err(BasisError::ZeroDenominator(i as f64).into());
            }
            worst = worst.max((self.values[i] - num / den).abs());
        }
        Ok(worst)
    }

    fn min_denominator(&self, b: &[f64]) -> f64 {
        (0..self.len()).map(|i| dot(b, self.h(i))).fold(f64::INFINITY, f64::min)
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Value imposed on `b_0` to remove the scaling ambiguity of `(A, B)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixedSign {
    Plus,
    Minus,
}

impl FixedSign {
    pub fn value(self) -> f64 {
        match self {
            FixedSign::Plus => 1.0,
            FixedSign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BisectionConfig {
    /// Absolute precision on `z`.
    pub epsilon: f64,
    /// Denominator floor; `None` selects [`ApproximationProblem::default_delta`].
    pub delta: Option<f64>,
    /// Replaces the polynomial upper bound when set.
    pub upper_bound_override: Option<f64>,
    pub max_iterations: usize,
    /// A probe is feasible when the optimal `θ` is at most this.
    pub theta_tol: f64,
    pub lp: LpConfig,
}

impl Default for BisectionConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-10,
            delta: None,
            upper_bound_override: None,
            max_iterations: 200,
            theta_tol: 1e-9,
            lp: LpConfig::default(),
        }
    }
}

impl BisectionConfig {
    /// Defaults used for sampled signals.
    pub fn for_signals() -> Self {
        Self { epsilon: 1e-6, ..Self::default() }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<(), MinimaxError> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(MinimaxError::InvalidConfig("epsilon must be positive"));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(MinimaxError::InvalidConfig("delta must be positive"));
            }
        }
        if let Some(u) = self.upper_bound_override {
            if !(u >= 0.0 && u.is_finite()) {
                return Err(MinimaxError::InvalidConfig("upper bound must be nonnegative"));
            }
        }
        if self.theta_tol < 0.0 {
            return Err(MinimaxError::InvalidConfig("theta tolerance must be nonnegative"));
        }
        Ok(())
    }
}

/// One bisection probe as an LP over `(A, b_1..b_m, θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityInstance {
    pub z: f64,
    pub delta: f64,
    pub fixed_sign: FixedSign,
    pub lp: LpProblem,
    numerator_len: usize,
    denominator_len: usize,
}

impl FeasibilityInstance {
    fn from_design(design: &Design<'_>, z: f64, delta: f64, fixed_sign: FixedSign) -> Result<Self, LpError> {
        let (k, l) = (design.k, design.l);
        let p = k + (l - 1) + 1;
        let theta = p - 1;
        let b0 = fixed_sign.value();
        let mut objective = vec![0.0; p];
        objective[theta] = 1.0;
        let n = design.len();
        let mut lp = LpProblem::with_capacity(objective, 3 * n)?;
        // θ only decides the verdict through its sign; the floor keeps the
        // LP bounded when the free part of B can grow without limit.
        let scale = design.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        lp.set_bounds(theta, -scale, f64::INFINITY)?;

        let mut row = vec![0.0; p];
        row[theta] = -1.0;
        // (f_i - z)·B·H_i - A·G_i <= θ
        for i in 0..n {
            let (g, h, shift) = (design.g(i), design.h(i), design.values[i] - z);
            row[..k].iter_mut().zip(g).for_each(|(r, gv)| *r = -gv);
            row[k..theta].iter_mut().zip(&h[1..]).for_each(|(r, hv)| *r = shift * hv);
            lp.add_constraint(&row, Relation::Le, -shift * b0 * h[0])?;
        }
        // A·G_i - (f_i + z)·B·H_i <= θ
        for i in 0..n {
            let (g, h, shift) = (design.g(i), design.h(i), design.values[i] + z);
            row[..k].copy_from_slice(g);
            row[k..theta].iter_mut().zip(&h[1..]).for_each(|(r, hv)| *r = -shift * hv);
            lp.add_constraint(&row, Relation::Le, shift * b0 * h[0])?;
        }
        // -B·H_i <= -δ
        row[theta] = 0.0;
        row[..k].iter_mut().for_each(|r| *r = 0.0);
        for i in 0..n {
            let h = design.h(i);
            row[k..theta].iter_mut().zip(&h[1..]).for_each(|(r, hv)| *r = -hv);
            lp.add_constraint(&row, Relation::Le, -delta + b0 * h[0])?;
        }
        Ok(Self { z, delta, fixed_sign, lp, numerator_len: k, denominator_len: l })
    }

    pub fn num_vars(&self) -> usize {
        self.lp.num_vars()
    }

    pub fn num_rows(&self) -> usize {
        self.lp.num_constraints()
    }

    pub fn solve(&self, cfg: &LpConfig) -> Result<LpSolution, LpError> {
        lp::solve(&self.lp, cfg)
    }

    /// Splits an LP assignment into `(A, B, θ)`, restoring the fixed `b_0`.
    pub fn unpack(&self, values: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let k = self.numerator_len;
        let theta = values[values.len() - 1];
        let a = values[..k].to_vec();
        let mut b = Vec::with_capacity(self.denominator_len);
        b.push(self.fixed_sign.value());
        b.extend_from_slice(&values[k..values.len() - 1]);
        (a, b, theta)
    }
}

/// Builds the feasibility LP for level `z`.
pub fn build_feasibility_lp<B: Basis>(
    problem: &ApproximationProblem<B>,
    z: f64,
    delta: f64,
    fixed_sign: FixedSign,
) -> Result<FeasibilityInstance, MinimaxError> {
    if !(z >= 0.0 && z.is_finite()) {
        return Err(MinimaxError::InvalidConfig("probe level must be nonnegative"));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(MinimaxError::InvalidConfig("delta must be positive"));
    }
    Ok(FeasibilityInstance::from_design(&Design::new(problem), z, delta, fixed_sign)?)
}

/// Outcome of one level test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub z: f64,
    /// Optimal θ, or `None` when the LP itself was infeasible.
    pub theta: Option<f64>,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalApproximant<B = BasisSpec> {
    pub basis: B,
    /// `A`, in the normalized coordinate.
    pub numerator: Vec<f64>,
    /// `B`, with `b_0 = ±1` fixed.
    pub denominator: Vec<f64>,
    /// Final feasible level `u`.
    pub z: f64,
    /// Measured `max_i |f - r|` for the returned coefficients.
    pub max_deviation: f64,
    /// Final infeasible level `l`.
    pub lower_bound: f64,
    pub initial_upper_bound: f64,
    pub iterations: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub fixed_sign: FixedSign,
    pub interval_map: IntervalMap,
    pub probes: Vec<ProbeRecord>,
}

impl<B: Basis> RationalApproximant<B> {
    /// Value at `t` in the original coordinate.
    pub fn eval(&self, t: f64) -> Result<f64, BasisError> {
        crate::basis::eval_ratio(&self.basis, &self.numerator, &self.denominator, self.interval_map.to_unit(t))
    }

    /// `(t, f(t) - r(t))` at every grid node of `problem`.
    pub fn error_curve(&self, problem: &ApproximationProblem<B>) -> Result<Vec<(f64, f64)>, BasisError> {
        problem.grid().nodes().iter().zip(problem.values()).map(|(&t, &f)| self.eval(t).map(|r| (t, f - r))).collect()
    }
}

/// Deviation of the best approximation from the numerator family alone
/// (`B = e_0`). Any such approximant is a feasible rational solution.
pub fn initial_upper_bound<B: Basis>(problem: &ApproximationProblem<B>) -> Result<f64, MinimaxError> {
    let design = Design::new(problem);
    Ok(minimax_on_rows(design.values, &design.g, design.k, &LpConfig::default())?.1)
}

struct Probe {
    record: ProbeRecord,
    coefficients: Option<(Vec<f64>, Vec<f64>)>,
}

fn probe(
    design: &Design<'_>,
    z: f64,
    delta: f64,
    sign: FixedSign,
    cfg: &BisectionConfig,
) -> Result<Probe, MinimaxError> {
    let inst = FeasibilityInstance::from_design(design, z, delta, sign)?;
    let sol = inst.solve(&cfg.lp)?;
    Ok(match sol.status {
        LpStatus::Infeasible => Probe { record: ProbeRecord { z, theta: None, feasible: false }, coefficients: None },
        LpStatus::Optimal | LpStatus::Unbounded => {
            let (a, b, theta) = inst.unpack(&sol.values);
            let feasible = theta <= cfg.theta_tol;
            Probe { record: ProbeRecord { z, theta: Some(theta), feasible }, coefficients: feasible.then_some((a, b)) }
        }
    })
}

/// Bisection on the maximal deviation.
pub fn solve_minimax<B: Basis + Clone>(
    problem: &ApproximationProblem<B>,
    config: &BisectionConfig,
) -> Result<RationalApproximant<B>, MinimaxError> {
    config.validate()?;
    let design = Design::new(problem);
    let delta = config.delta.unwrap_or_else(|| problem.default_delta());
    let (k, l) = (design.k, design.l);
    let interval_map = problem.grid.interval_map();

    let finish = |a: Vec<f64>, b: Vec<f64>, z, lower, u0, iterations, sign, probes| -> Result<_, MinimaxError> {
        let max_deviation = design.deviation(&a, &b)?;
        Ok(RationalApproximant {
            basis: problem.basis.clone(),
            numerator: a,
            denominator: b,
            z,
            max_deviation,
            lower_bound: lower,
            initial_upper_bound: u0,
            iterations,
            epsilon: config.epsilon,
            delta,
            fixed_sign: sign,
            interval_map,
            probes,
        })
    };

    // Constant data is represented exactly by A = f·e_0 (or A = 0), B = e_0.
    let first = problem.values[0];
    if problem.values.iter().all(|&v| v == first) && (first == 0.0 || problem.basis.numerator_has_constant()) {
        let mut a = vec![0.0; k];
        a[0] = first;
        let mut b = vec![0.0; l];
        b[0] = 1.0;
        if design.min_denominator(&b) >= delta {
            return finish(a, b, 0.0, 0.0, 0.0, 0, FixedSign::Plus, Vec::new());
        }
    }

    let u0 = match config.upper_bound_override {
        Some(u) => u,
        None => initial_upper_bound(problem)?,
    };

    for sign in [FixedSign::Plus, FixedSign::Minus] {
        let start = probe(&design, u0, delta, sign, config)?;
        let Some(mut best) = start.coefficients else {
            continue;
        };
        let mut probes = vec![start.record];
        let (mut lower, mut upper) = (0.0_f64, u0);
        let mut iterations = 0;
        while upper - lower > config.epsilon {
            if iterations >= config.max_iterations {
                return Err(MinimaxError::MaxIterations { iterations, lower, upper });
            }
            let z = 0.5 * (upper + lower);
            iterations += 1;
            let p = probe(&design, z, delta, sign, config)?;
            probes.push(p.record);
            match p.coefficients {
                Some(c) => {
                    upper = z;
                    best = c;
                }
                None => lower = z,
            }
        }
        return finish(best.0, best.1, upper, lower, u0, iterations, sign, probes);
    }
    Err(MinimaxError::NoFeasibleStart { upper: u0, delta })
}

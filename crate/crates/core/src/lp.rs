//! Dense two-phase simplex for linear programs of the form
//!
//! ```text
//! minimize    c·x
//! subject to  a_i·x <= b_i           i = 1..M
//!             lower_j <= x_j <= upper_j
//! ```
//!
//! The problems solved here have many rows (thousands) and few columns
//! (a dozen), so the engine works with a *row basis*: a working set of `p`
//! linearly independent active constraints, where `p` is the number of
//! variables. A nonbasic free variable counts as a member of the working set
//! (it is pinned at zero until it is released). Each iteration factors the
//! dense `p x p` basis matrix from scratch, so no round-off accumulates in a
//! tableau, and a pivot costs `O(M·p + p^3)`.
//!
//! Two methods share that machinery. The primal two-phase method walks
//! from vertex to vertex and handles any problem. The dual method starts
//! from a working set of variable bounds that already prices out the cost
//! vector and activates the most violated row at each step; on problems with
//! thousands of rows it needs far fewer pivots. [`Algorithm::Auto`] uses it
//! whenever the bounds allow.
//!
//! Finite variable bounds are appended as extra rows internally. Free
//! variables are never split into differences.

#![allow(clippy::needless_range_loop)]

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("constraint has {found} coefficients, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid bounds for variable {index}: [{lower}, {upper}]")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },
    #[error("numerical breakdown at iteration {iteration}: {reason}")]
    NumericalBreakdown { iteration: usize, reason: &'static str },
    #[error("iteration limit of {0} reached")]
    IterationLimit(usize),
}

/// Direction of a constraint as supplied by the caller. Rows are stored in
/// `<=` form; `Ge` rows are negated on insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
}

/// Simplex variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Dual simplex when the variable bounds give a dual-feasible start,
    /// otherwise the primal two-phase method.
    Auto,
    PrimalTwoPhase,
    /// Dual simplex; falls back to the primal method when no dual-feasible
    /// start exists.
    Dual,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpConfig {
    pub algorithm: Algorithm,
    /// Absolute primal feasibility tolerance per constraint.
    pub feasibility_tol: f64,
    /// Entries of magnitude below this are never used as pivots.
    pub pivot_tol: f64,
    /// Reduced-cost tolerance for the optimality test.
    pub optimality_tol: f64,
    /// Bland's rule is engaged after `bland_factor * (rows + cols)` iterations.
    pub bland_factor: usize,
    /// Hard cap on total iterations; `None` means `50 * (rows + cols)`.
    pub max_iterations: Option<usize>,
}

impl Default for LpConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Auto,
            feasibility_tol: 1e-9,
            pivot_tol: 1e-12,
            optimality_tol: 1e-9,
            bland_factor: 5,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Variable assignment. For `Infeasible` this is the phase-one point.
    pub values: Vec<f64>,
    pub objective_value: f64,
    /// Lagrange multipliers of the constraints (nonnegative at an optimum).
    pub duals: Vec<f64>,
    /// Multipliers of the (lower, upper) variable bounds.
    pub bound_duals: Vec<(f64, f64)>,
    /// Optimal phase-one infeasibility (zero when phase one was skipped).
    pub phase_one_objective: f64,
    pub iterations: usize,
}

/// A dense LP with `<=` rows and per-variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    objective: Vec<f64>,
    rows: Vec<f64>,
    rhs: Vec<f64>,
    bounds: Vec<(f64, f64)>,
}

impl LpProblem {
    /// A problem with the given cost vector and all variables free.
    pub fn new(objective: Vec<f64>) -> Result<Self, LpError> {
        if objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite("objective"));
        }
        let n = objective.len();
        Ok(Self { objective, rows: Vec::new(), rhs: Vec::new(), bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); n] })
    }

    pub fn with_capacity(objective: Vec<f64>, rows: usize) -> Result<Self, LpError> {
        let mut lp = Self::new(objective)?;
        lp.rows.reserve(rows * lp.num_vars());
        lp.rhs.reserve(rows);
        Ok(lp)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rhs.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    /// Row `i` in `<=` form.
    pub fn row(&self, i: usize) -> (&[f64], f64) {
        let p = self.num_vars();
        (&self.rows[i * p..(i + 1) * p], self.rhs[i])
    }

    pub fn add_constraint(&mut self, coeffs: &[f64], relation: Relation, rhs: f64) -> Result<(), LpError> {
        if coeffs.len() != self.num_vars() {
            return Err(LpError::DimensionMismatch { expected: self.num_vars(), found: coeffs.len() });
        }
        if !rhs.is_finite() || coeffs.iter().any(|a| !a.is_finite()) {
            return Err(LpError::NonFinite("constraint"));
        }
        match relation {
            Relation::Le => {
                self.rows.extend_from_slice(coeffs);
                self.rhs.push(rhs);
            }
            Relation::Ge => {
                self.rows.extend(coeffs.iter().map(|a| -a));
                self.rhs.push(-rhs);
            }
        }
        Ok(())
    }

    /// Sets the bounds of variable `index`; either side may be infinite.
    pub fn set_bounds(&mut self, index: usize, lower: f64, upper: f64) -> Result<(), LpError> {
        if index >= self.num_vars() {
            return Err(LpError::DimensionMismatch { expected: self.num_vars(), found: index + 1 });
        }
        if lower.is_nan() || upper.is_nan() || lower > upper || lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(LpError::InvalidBounds { index, lower, upper });
        }
        self.bounds[index] = (lower, upper);
        Ok(())
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.num_constraints() {
            let (a, b) = self.row(i);
            worst = worst.max(dot(a, x) - b);
        }
        for (xj, &(lo, hi)) in x.iter().zip(&self.bounds) {
            worst = worst.max(lo - xj).max(xj - hi);
        }
        worst
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        solve(self, &LpConfig::default())
    }
}

impl fmt::Display for LpProblem {
    /// Plain-text dump, one row per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "min {:?}", self.objective)?;
        for i in 0..self.num_constraints() {
            let (a, b) = self.row(i);
            writeln!(f, "r{i}: {a:?} <= {b}")?;
        }
        for (j, (lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_finite() || hi.is_finite() {
                writeln!(f, "x{j} in [{lo}, {hi}]")?;
            }
        }
        Ok(())
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense LU factorization with partial pivoting.
struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl DenseLu {
    fn factor(mut a: Vec<f64>, n: usize, pivot_tol: f64) -> Option<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
        for k in 0..n {
            let (mut piv, mut best) = (k, a[k * n + k].abs());
            for r in k + 1..n {
                let v = a[r * n + k].abs();
                if v > best {
                    piv = r;
                    best = v;
                }
            }
            if best <= pivot_tol * scale {
                return None;
            }
            if piv != k {
                for c in 0..n {
                    a.swap(k * n + c, piv * n + c);
                }
                perm.swap(k, piv);
            }
            let d = a[k * n + k];
            for r in k + 1..n {
                let l = a[r * n + k] / d;
                a[r * n + k] = l;
                if l != 0.0 {
                    for c in k + 1..n {
                        a[r * n + c] -= l * a[k * n + c];
                    }
                }
            }
        }
        Some(Self { n, lu: a, perm })
    }

    /// Solves `A x = b`.
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        for r in 0..n {
            let mut s = x[r];
            for c in 0..r {
                s -= self.lu[r * n + c] * x[c];
            }
            x[r] = s;
        }
        for r in (0..n).rev() {
            let mut s = x[r];
            for c in r + 1..n {
                s -= self.lu[r * n + c] * x[c];
            }
            x[r] = s / self.lu[r * n + r];
        }
        x
    }

    /// Solves `A^T y = c`.
    fn solve_transpose(&self, c: &[f64]) -> Vec<f64> {
        let n = self.n;
        // A = P^T L U, so A^T y = U^T L^T P y = c.
        let mut w = c.to_vec();
        for r in 0..n {
            let mut s = w[r];
            for k in 0..r {
                s -= self.lu[k * n + r] * w[k];
            }
            w[r] = s / self.lu[r * n + r];
        }
        for r in (0..n).rev() {
            let mut s = w[r];
            for k in r + 1..n {
                s -= self.lu[k * n + r] * w[k];
            }
            w[r] = s;
        }
        let mut y = vec![0.0; n];
        for (k, &i) in self.perm.iter().enumerate() {
            y[i] = w[k];
        }
        y
    }
}

/// Element of the working set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Member {
    /// Free variable pinned at zero.
    Var(usize),
    /// Active row.
    Row(usize),
}

/// Row-major `<=` system used by one phase.
struct System<'a> {
    width: usize,
    a: &'a [f64],
    b: &'a [f64],
}

impl System<'_> {
    fn rows(&self) -> usize {
        self.b.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.width..(i + 1) * self.width]
    }
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Engine<'c> {
    cfg: &'c LpConfig,
    iterations: usize,
    bland_after: usize,
    limit: usize,
}

struct Vertex {
    members: Vec<Member>,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl Engine<'_> {
    fn factor(&self, sys: &System<'_>, members: &[Member]) -> Result<DenseLu, LpError> {
        let p = sys.width;
        let mut mat = vec![0.0; p * p];
        for (k, m) in members.iter().enumerate() {
            match *m {
                Member::Var(j) => mat[k * p + j] = 1.0,
                Member::Row(i) => mat[k * p..(k + 1) * p].copy_from_slice(sys.row(i)),
            }
        }
        DenseLu::factor(mat, p, self.cfg.pivot_tol)
            .ok_or(LpError::NumericalBreakdown { iteration: self.iterations, reason: "singular basis" })
    }

    fn vertex(&self, sys: &System<'_>, lu: &DenseLu, members: &[Member]) -> Vec<f64> {
        let r: Vec<f64> = members
            .iter()
            .map(|m| match *m {
                Member::Var(_) => 0.0,
                Member::Row(i) => sys.b[i],
            })
            .collect();
        lu.solve(&r)
    }

    fn global_index(&self, sys: &System<'_>, m: Member) -> usize {
        match m {
            Member::Var(j) => j,
            Member::Row(i) => sys.width + i,
        }
    }

    /// Runs simplex iterations from a feasible working set until optimality
    /// or unboundedness.
    fn run(&mut self, sys: &System<'_>, cost: &[f64], members: &mut [Member]) -> Result<(PhaseEnd, Vertex), LpError> {
        let p = sys.width;
        let mut in_set = vec![false; sys.rows()];
        for m in members.iter() {
            if let Member::Row(i) = *m {
                in_set[i] = true;
            }
        }
        loop {
            let lu = self.factor(sys, members)?;
            let x = self.vertex(sys, &lu, members);
            let y = lu.solve_transpose(cost);
            let bland = self.iterations >= self.bland_after;

            // Pricing. Releasing an active row moves into its interior
            // (slack grows); a pinned free variable may move either way.
            let mut entering: Option<(usize, f64, f64)> = None; // (slot, score, sigma)
            for (k, m) in members.iter().enumerate() {
                let (score, sigma) = match *m {
                    Member::Row(_) => (y[k], -1.0),
                    Member::Var(_) => (y[k].abs(), -y[k].signum()),
                };
                if score <= self.cfg.optimality_tol {
                    continue;
                }
                let better = match entering {
                    None => true,
                    Some((bk, bs, _)) => {
                        if bland {
                            self.global_index(sys, *m) < self.global_index(sys, members[bk])
                        } else {
                            score > bs
                        }
                    }
                };
                if better {
                    entering = Some((k, score, sigma));
                }
            }
            let Some((slot, _, sigma)) = entering else {
                return Ok((PhaseEnd::Optimal, Vertex { members: members.to_vec(), x, y }));
            };

            if self.iterations >= self.limit {
                return Err(LpError::IterationLimit(self.iterations));
            }
            self.iterations += 1;

            let mut unit = vec![0.0; p];
            unit[slot] = sigma;
            let dir = lu.solve(&unit);
            let dir_norm = dir.iter().fold(0.0_f64, |m, v| m.max(v.abs()));

            // Ratio test over inactive rows.
            let mut leave: Option<(usize, f64, f64)> = None; // (row, ratio, alpha)
            let mut tiny_block = false;
            for i in 0..sys.rows() {
                if in_set[i] {
                    continue;
                }
                let a = sys.row(i);
                let alpha = dot(a, &dir);
                if alpha <= self.cfg.pivot_tol {
                    if alpha > 0.0 {
                        let noise = f64::EPSILON * 16.0 * dir_norm * a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                        if alpha > noise {
                            tiny_block = true;
                        }
                    }
                    continue;
                }
                let slack = (sys.b[i] - dot(a, &x)).max(0.0);
                let ratio = slack / alpha;
                let take = match leave {
                    None => true,
                    Some((bi, br, ba)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                        if tie {
                            if bland {
                                i < bi
                            } else {
                                alpha > ba
                            }
                        } else {
                            ratio < br
                        }
                    }
                };
                if take {
                    leave = Some((i, ratio, alpha));
                }
            }
            match leave {
                None if tiny_block => {
                    return Err(LpError::NumericalBreakdown {
                        iteration: self.iterations,
                        reason: "only sub-tolerance pivots block the entering direction",
                    })
                }
                None => {
                    return Ok((PhaseEnd::Unbounded, Vertex { members: members.to_vec(), x, y }));
                }
                Some((row, _, _)) => {
                    if let Member::Row(old) = members[slot] {
                        in_set[old] = false;
                    }
                    in_set[row] = true;
                    members[slot] = Member::Row(row);
                }
            }
        }
    }
}

enum DualEnd {
    Optimal(Vertex),
    Infeasible,
}

impl Engine<'_> {
    /// Dual simplex from a dual-feasible working set: repeatedly activate the
    /// most violated row and drop the member whose multiplier reaches zero
    /// first.
    fn run_dual(&mut self, sys: &System<'_>, cost: &[f64], members: &mut [Member]) -> Result<DualEnd, LpError> {
        let mut in_set = vec![false; sys.rows()];
        for m in members.iter() {
            if let Member::Row(i) = *m {
                in_set[i] = true;
            }
        }
        loop {
            let lu = self.factor(sys, members)?;
            let x = self.vertex(sys, &lu, members);
            let y = lu.solve_transpose(cost);
            let bland = self.iterations >= self.bland_after;

            let mut entering: Option<(usize, f64)> = None;
            for i in 0..sys.rows() {
                if in_set[i] {
                    continue;
                }
                let violation = dot(sys.row(i), &x) - sys.b[i];
                if violation <= self.cfg.feasibility_tol * 0.1 {
                    continue;
                }
                // bland: first violated row
                if bland {
                    entering = Some((i, violation));
                    break;
                }
                if entering.is_none_or(|(_, v)| violation > v) {
                    entering = Some((i, violation));
                }
            }
            let Some((row, _)) = entering else {
                return Ok(DualEnd::Optimal(Vertex { members: members.to_vec(), x, y }));
            };
            if self.iterations >= self.limit {
                return Err(LpError::IterationLimit(self.iterations));
            }
            self.iterations += 1;

            let w = lu.solve_transpose(sys.row(row));
            // A pinned free variable has multiplier zero; it must leave as
            // soon as the new row loads it.
            let mut leave: Option<(usize, f64, f64)> = None; // (slot, ratio, weight)
            for (k, m) in members.iter().enumerate() {
                if let Member::Var(_) = *m {
                    let wk = w[k].abs();
                    if wk > self.cfg.pivot_tol {
                        let better = match leave {
                            None => true,
                            Some((bk, _, bw)) => {
                                if bland {
                                    self.global_index(sys, *m) < self.global_index(sys, members[bk])
                                } else {
                                    wk > bw
                                }
                            }
                        };
                        if better {
                            leave = Some((k, 0.0, wk));
                        }
                    }
                }
            }
            if leave.is_none() {
                for (k, m) in members.iter().enumerate() {
                    if let Member::Row(_) = *m {
                        if w[k] <= self.cfg.pivot_tol {
                            continue;
                        }
                        let ratio = (-y[k]).max(0.0) / w[k];
                        let take = match leave {
                            None => true,
                            Some((bk, br, bw)) => {
                                let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                                if tie {
                                    if bland {
                                        self.global_index(sys, *m) < self.global_index(sys, members[bk])
                                    } else {
                                        w[k] > bw
                                    }
                                } else {
                                    ratio < br
                                }
                            }
                        };
                        if take {
                            leave = Some((k, ratio, w[k]));
                        }
                    }
                }
            }
            let Some((slot, _, _)) = leave else {
                return Ok(DualEnd::Infeasible);
            };
            if let Member::Row(old) = members[slot] {
                in_set[old] = false;
            }
            in_set[row] = true;
            members[slot] = Member::Row(row);
        }
    }
}

/// Working set whose multipliers are the costs themselves: each variable
/// with a positive (negative) cost sits at its lower (upper) bound, each
/// zero-cost variable is pinned. `None` if some bound is missing.
fn dual_start(problem: &LpProblem, bound_rows: &[(usize, bool)], m_user: usize) -> Option<Vec<Member>> {
    problem
        .objective
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            if c == 0.0 {
                return Some(Member::Var(j));
            }
            let want_upper = c < 0.0;
            bound_rows.iter().position(|&(var, upper)| var == j && upper == want_upper).map(|r| Member::Row(m_user + r))
        })
        .collect()
}

/// Solves `problem` with the row-basis simplex selected by `cfg.algorithm`.
pub fn solve(problem: &LpProblem, cfg: &LpConfig) -> Result<LpSolution, LpError> {
    let p = problem.num_vars();
    let m_user = problem.num_constraints();

    // Append finite bounds as rows.
    let mut a = problem.rows.clone();
    let mut b = problem.rhs.clone();
    let mut bound_rows: Vec<(usize, bool)> = Vec::new(); // (var, is_upper)
    for (j, &(lo, hi)) in problem.bounds.iter().enumerate() {
        if hi.is_finite() {
            a.extend((0..p).map(|k| if k == j { 1.0 } else { 0.0 }));
            b.push(hi);
            bound_rows.push((j, true));
        }
        if lo.is_finite() {
            a.extend((0..p).map(|k| if k == j { -1.0 } else { 0.0 }));
            b.push(-lo);
            bound_rows.push((j, false));
        }
    }
    let rows = b.len();
    let budget = cfg.max_iterations.unwrap_or(50 * (rows + p).max(1));
    let mut engine = Engine { cfg, iterations: 0, bland_after: cfg.bland_factor * (rows + p), limit: budget };

    if p == 0 {
        let feasible = b.iter().all(|&bi| bi >= -cfg.feasibility_tol);
        return Ok(LpSolution {
            status: if feasible { LpStatus::Optimal } else { LpStatus::Infeasible },
            values: Vec::new(),
            objective_value: 0.0,
            duals: vec![0.0; m_user],
            bound_duals: Vec::new(),
            phase_one_objective: b.iter().fold(0.0_f64, |w, &bi| w.max(-bi)),
            iterations: 0,
        });
    }

    let sys = System { width: p, a: &a, b: &b };
    let start = match cfg.algorithm {
        Algorithm::PrimalTwoPhase => None,
        Algorithm::Auto | Algorithm::Dual => dual_start(problem, &bound_rows, m_user),
    };
    if let Some(mut members) = start {
        match engine.run_dual(&sys, &problem.objective, &mut members)? {
            DualEnd::Optimal(vtx) => {
                return finish(problem, &sys, &bound_rows, vtx, PhaseEnd::Optimal, 0.0, engine.iterations, cfg);
            }
            // Confirm with a phase-one optimum so that an infeasible verdict
            // always carries the same certificate.
            DualEnd::Infeasible => {}
        }
    }
    primal_two_phase(problem, &sys, &bound_rows, &mut engine, cfg)
}

fn primal_two_phase(
    problem: &LpProblem,
    sys: &System<'_>,
    bound_rows: &[(usize, bool)],
    engine: &mut Engine<'_>,
    cfg: &LpConfig,
) -> Result<LpSolution, LpError> {
    let p = sys.width;
    let (a, b) = (sys.a, sys.b);
    let rows = sys.rows();
    let m_user = problem.num_constraints();
    let mut members: Vec<Member> = (0..p).map(Member::Var).collect();
    let mut phase_one_objective = 0.0;

    // The origin is the starting vertex; it is feasible iff every b_i >= 0.
    let (worst_row, worst) =
        b.iter().enumerate().fold((usize::MAX, 0.0_f64), |(wi, w), (i, &bi)| if -bi > w { (i, -bi) } else { (wi, w) });
    if worst > cfg.feasibility_tol {
        // Phase one: one artificial column `w` added to every row,
        // a_i·x - w <= b_i, plus -w <= 0; minimize w.
        let wp = p + 1;
        let mut a1 = Vec::with_capacity((rows + 1) * wp);
        for i in 0..rows {
            a1.extend_from_slice(&a[i * p..(i + 1) * p]);
            a1.push(-1.0);
        }
        a1.extend(std::iter::repeat_n(0.0, p));
        a1.push(-1.0);
        let mut b1 = b.to_vec();
        b1.push(0.0);
        let sys1 = System { width: wp, a: &a1, b: &b1 };
        let mut cost1 = vec![0.0; wp];
        cost1[p] = 1.0;
        let mut members1 = members.clone();
        members1.push(Member::Row(worst_row));

        let (_, v1) = engine.run(&sys1, &cost1, &mut members1)?;
        phase_one_objective = v1.x[p];
        if phase_one_objective > cfg.feasibility_tol {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                values: v1.x[..p].to_vec(),
                objective_value: f64::NAN,
                duals: vec![0.0; m_user],
                bound_duals: vec![(0.0, 0.0); p],
                phase_one_objective,
                iterations: engine.iterations,
            });
        }

        let w_row = Member::Row(rows);
        if !members1.contains(&w_row) {
            // Degenerate exit: w ~ 0 is implied by other members. Swap the
            // member carrying the largest weight on e_w for the w >= 0 row.
            let lu = engine.factor(&sys1, &members1)?;
            let mut ew = vec![0.0; wp];
            ew[p] = 1.0;
            let weights = lu.solve_transpose(&ew);
            let (slot, _) =
                weights
                    .iter()
                    .enumerate()
                    .fold((0, -1.0), |(bk, bw), (k, w)| if w.abs() > bw { (k, w.abs()) } else { (bk, bw) });
            members1[slot] = w_row;
        }
        members = members1.into_iter().filter(|m| *m != w_row).collect();
    }

    let (end, vtx) = engine.run(sys, &problem.objective, &mut members)?;
    finish(problem, sys, bound_rows, vtx, end, phase_one_objective, engine.iterations, cfg)
}

#[allow(clippy::too_many_arguments)]
fn finish(
    problem: &LpProblem,
    sys: &System<'_>,
    bound_rows: &[(usize, bool)],
    vtx: Vertex,
    end: PhaseEnd,
    phase_one_objective: f64,
    iterations: usize,
    cfg: &LpConfig,
) -> Result<LpSolution, LpError> {
    let p = sys.width;
    let m_user = problem.num_constraints();
    let x = vtx.x;
    let mut duals = vec![0.0; m_user];
    let mut bound_duals = vec![(0.0, 0.0); p];
    for (k, m) in vtx.members.iter().enumerate() {
        if let Member::Row(i) = *m {
            let lambda = -vtx.y[k];
            if i < m_user {
                duals[i] = lambda;
            } else {
                let (j, upper) = bound_rows[i - m_user];
                if upper {
                    bound_duals[j].1 = lambda;
                } else {
                    bound_duals[j].0 = lambda;
                }
            }
        }
    }

    let violation =
        (0..sys.rows()).map(|i| (dot(sys.row(i), &x) - sys.b[i]) / sys.b[i].abs().max(1.0)).fold(0.0_f64, f64::max);
    if violation > cfg.feasibility_tol {
        return Err(LpError::NumericalBreakdown {
            iteration: iterations,
            reason: "final vertex violates a constraint beyond tolerance",
        });
    }

    let status = match end {
        PhaseEnd::Optimal => LpStatus::Optimal,
        PhaseEnd::Unbounded => LpStatus::Unbounded,
    };
    let objective_value = match status {
        LpStatus::Unbounded => f64::NEG_INFINITY,
        _ => dot(&problem.objective, &x),
    };
    Ok(LpSolution { status, values: x, objective_value, duals, bound_duals, phase_one_objective, iterations })
}

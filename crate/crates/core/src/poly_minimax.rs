//! Discrete best uniform approximation from a single linear family, solved
//! as one LP: minimize `z` subject to `|f(t_i) - P(t_i)| <= z`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::{Basis, BasisSpec, DenominatorFamily, IntervalMap, NumeratorFamily};
use crate::grid::Grid;
use crate::lp::{self, LpConfig, LpError, LpProblem, LpStatus, Relation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("{values} values for {nodes} grid nodes")]
    LengthMismatch { values: usize, nodes: usize },
    #[error("non-finite sample value at index {0}")]
    NonFinite(usize),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("polynomial LP ended with status {0:?}")]
    Status(LpStatus),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyApproximant {
    pub family: NumeratorFamily,
    pub degree: usize,
    /// Coefficients in the normalized coordinate.
    pub coefficients: Vec<f64>,
    /// Maximal deviation on the grid.
    pub z: f64,
    pub interval_map: IntervalMap,
}

impl PolyApproximant {
    fn as_basis(&self) -> BasisSpec {
        BasisSpec { numerator: self.family, denominator: DenominatorFamily::Monomial, n: self.degree, m: 0 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let g = self.as_basis().eval_numerator(self.interval_map.to_unit(t));
        g.iter().zip(&self.coefficients).map(|(x, y)| x * y).sum()
    }

    /// `(t, f(t) - P(t))` at every node.
    pub fn error_curve(&self, grid: &Grid, values: &[f64]) -> Vec<(f64, f64)> {
        grid.nodes().iter().zip(values).map(|(&t, &f)| (t, f - self.eval(t))).collect()
    }
}

/// Best approximation of `values` by `rows · a` where `rows` is row-major
/// `N x k`. Returns `(a, z)`.
pub(crate) fn minimax_on_rows(
    values: &[f64],
    rows: &[f64],
    k: usize,
    cfg: &LpConfig,
) -> Result<(Vec<f64>, f64), PolyError> {
    let mut objective = vec![0.0; k + 1];
    objective[k] = 1.0;
    let mut problem = LpProblem::with_capacity(objective, 2 * values.len())?;
    problem.set_bounds(k, 0.0, f64::INFINITY)?;
    let mut coeffs = vec![0.0; k + 1];
    coeffs[k] = -1.0;
    for (i, &f) in values.iter().enumerate() {
        let g = &rows[i * k..(i + 1) * k];
        // f - P <= z
        coeffs[..k].iter_mut().zip(g).for_each(|(c, gv)| *c = -gv);
        problem.add_constraint(&coeffs, Relation::Le, -f)?;
        // P - f <= z
        coeffs[..k].copy_from_slice(g);
        problem.add_constraint(&coeffs, Relation::Le, f)?;
    }
    let sol = lp::solve(&problem, cfg)?;
    if sol.status != LpStatus::Optimal {
        return Err(PolyError::Status(sol.status));
    }
    let mut a = sol.values;
    let z = a.pop().unwrap_or(0.0);
    Ok((a, z.max(0.0)))
}

pub fn solve_poly_minimax(
    values: &[f64],
    grid: &Grid,
    degree: usize,
    family: NumeratorFamily,
) -> Result<PolyApproximant, PolyError> {
    if values.len() != grid.len() {
        return Err(PolyError::LengthMismatch { values: values.len(), nodes: grid.len() });
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(PolyError::NonFinite(i));
    }
    let spec = BasisSpec { numerator: family, denominator: DenominatorFamily::Monomial, n: degree, m: 0 };
    let k = degree + 1;
    let mut rows = vec![0.0; grid.len() * k];
    for (i, s) in grid.unit_nodes().into_iter().enumerate() {
        spec.numerator_into(s, &mut rows[i * k..(i + 1) * k]);
    }
    let (coefficients, z) = minimax_on_rows(values, &rows, k, &LpConfig::default())?;
    Ok(PolyApproximant { family, degree, coefficients, z, interval_map: grid.interval_map() })
}

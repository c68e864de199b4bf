//! Best uniform (Chebyshev-norm) approximation of sampled functions by
//! ratios of linear combinations of basis functions.
//!
//! The rational problem is quasiconvex in its coefficients, so it is solved
//! by bisection on the maximal deviation with one LP feasibility probe per
//! level ([`minimax`]). Supporting pieces: a dense simplex ([`lp`]), basis
//! families ([`basis`]), grids ([`grid`]), the polynomial baseline
//! ([`poly_minimax`]), alternation diagnostics ([`equioscillation`]), the
//! sine-modulated model ([`sine_model`]) and a signal-to-feature pipeline
//! ([`signal_pipeline`]).

pub mod basis;
pub mod cli;
pub mod equioscillation;
pub mod grid;
pub mod lp;
pub mod minimax;
pub mod poly_minimax;
pub mod signal_pipeline;
pub mod sine_model;

pub use basis::{Basis, BasisSpec, DenominatorFamily, IntervalMap, NumeratorFamily};
pub use grid::{chebyshev_nodes, uniform_nodes, Grid};
pub use minimax::{
    build_feasibility_lp, initial_upper_bound, solve_minimax, ApproximationProblem, BisectionConfig, FixedSign,
    RationalApproximant,
};
pub use poly_minimax::{solve_poly_minimax, PolyApproximant};
pub use sine_model::{fit_sine_model, SineFitResult, SineSearchSpace, TimeAxis};

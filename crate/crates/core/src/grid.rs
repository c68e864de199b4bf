//! Discretization of the approximation interval.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basis::IntervalMap;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("interval [{0}, {1}] is empty or not finite")]
    EmptyInterval(f64, f64),
    #[error("need at least {min} nodes, got {found}")]
    TooFewNodes { min: usize, found: usize },
    #[error("nodes must be strictly increasing (index {0})")]
    NotIncreasing(usize),
    #[error("node {0} lies outside the interval")]
    OutOfInterval(usize),
}

/// Ordered nodes `t_1 < ... < t_N` in `[c, d]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    nodes: Vec<f64>,
    interval: (f64, f64),
}

fn check_interval(c: f64, d: f64) -> Result<(), GridError> {
    if !(c.is_finite() && d.is_finite() && c < d) {
        return Err(GridError::EmptyInterval(c, d));
    }
    Ok(())
}

impl Grid {
    /// Validates user-supplied nodes.
    pub fn from_nodes(nodes: Vec<f64>, c: f64, d: f64) -> Result<Self, GridError> {
        check_interval(c, d)?;
        if nodes.is_empty() {
            return Err(GridError::TooFewNodes { min: 1, found: 0 });
        }
        for (i, &t) in nodes.iter().enumerate() {
            if !(t >= c && t <= d) {
                return Err(GridError::OutOfInterval(i));
            }
            if i > 0 && t <= nodes[i - 1] {
                return Err(GridError::NotIncreasing(i));
            }
        }
        Ok(Self { nodes, interval: (c, d) })
    }

    /// Nodes spanning their own range.
    pub fn from_samples(nodes: Vec<f64>) -> Result<Self, GridError> {
        match (nodes.first(), nodes.last()) {
            (Some(&c), Some(&d)) => Self::from_nodes(nodes, c, d),
            _ => Err(GridError::TooFewNodes { min: 2, found: 0 }),
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn interval_map(&self) -> IntervalMap {
        IntervalMap::new(self.interval.0, self.interval.1)
    }

    /// Nodes mapped onto `[-1, 1]`.
    pub fn unit_nodes(&self) -> Vec<f64> {
        let map = self.interval_map();
        self.nodes.iter().map(|&t| map.to_unit(t)).collect()
    }
}

/// `N` Chebyshev points `cos(π(2ℓ-1)/(2N))` mapped to `[c, d]`, ascending.
pub fn chebyshev_nodes(c: f64, d: f64, n: usize) -> Result<Grid, GridError> {
    check_interval(c, d)?;
    if n == 0 {
        return Err(GridError::TooFewNodes { min: 1, found: 0 });
    }
    let map = IntervalMap::new(c, d);
    let denom = 2.0 * n as f64;
    // -cos(π(2k+1)/(2N)) = sin(π(2k+1-N)/(2N)); the integer numerator makes
    // the unit nodes exactly antisymmetric.
    let nodes = (0..n)
        .map(|k| {
            let j = 2 * k as i64 + 1 - n as i64;
            let x = (PI * j as f64 / denom).sin();
            map.from_unit(x).clamp(c, d)
        })
        .collect();
    Grid::from_nodes(nodes, c, d)
}

/// `N` equispaced points including both endpoints.
pub fn uniform_nodes(c: f64, d: f64, n: usize) -> Result<Grid, GridError> {
    check_interval(c, d)?;
    if n < 2 {
        return Err(GridError::TooFewNodes { min: 2, found: n });
    }
    let step = (d - c) / (n - 1) as f64;
    let nodes = (0..n).map(|k| if k == n - 1 { d } else { c + step * k as f64 }).collect();
    Grid::from_nodes(nodes, c, d)
}

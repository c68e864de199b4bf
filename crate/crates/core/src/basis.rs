//! Basis families for the numerator `G(t)` and denominator `H(t)`.
//!
//! All families are evaluated on the normalized coordinate `s ∈ [-1, 1]`;
//! see [`IntervalMap`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("expected {expected} {which} coefficients, got {found}")]
    CoefficientCount { which: &'static str, expected: usize, found: usize },
    #[error("denominator vanishes at t = {0}")]
    ZeroDenominator(f64),
}

/// Numerator families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NumeratorFamily {
    Monomial,
    ChebyshevT,
    /// `t^j · sin(omega·t + tau)`, `j = 0..=n`.
    SineModulatedMonomial {
        omega: f64,
        tau: f64,
    },
}

/// Denominator families (never sine-modulated).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenominatorFamily {
    Monomial,
    ChebyshevT,
}

/// Anything that can fill `G(t)` and `H(t)` rows.
///
/// [`BasisSpec`] is the stock implementation; library users may supply
/// their own families through this trait.
pub trait Basis {
    fn numerator_len(&self) -> usize;
    fn denominator_len(&self) -> usize;
    fn numerator_into(&self, t: f64, out: &mut [f64]);
    fn denominator_into(&self, t: f64, out: &mut [f64]);
    /// True when `g_0 ≡ 1`, i.e. constants are representable with `B = e_0`.
    fn numerator_has_constant(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub numerator: NumeratorFamily,
    pub denominator: DenominatorFamily,
    /// Numerator degree (`n + 1` functions).
    pub n: usize,
    /// Denominator degree (`m + 1` functions).
    pub m: usize,
}

impl BasisSpec {
    pub fn monomial(n: usize, m: usize) -> Self {
        Self { numerator: NumeratorFamily::Monomial, denominator: DenominatorFamily::Monomial, n, m }
    }

    pub fn chebyshev(n: usize, m: usize) -> Self {
        Self { numerator: NumeratorFamily::ChebyshevT, denominator: DenominatorFamily::ChebyshevT, n, m }
    }

    pub fn sine_modulated(n: usize, m: usize, omega: f64, tau: f64) -> Self {
        Self {
            numerator: NumeratorFamily::SineModulatedMonomial { omega, tau },
            denominator: DenominatorFamily::Monomial,
            n,
            m,
        }
    }

    pub fn eval_numerator(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.n + 1];
        self.numerator_into(t, &mut out);
        out
    }

    pub fn eval_denominator(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.m + 1];
        self.denominator_into(t, &mut out);
        out
    }

    /// `(A·G(t)) / (B·H(t))`.
    pub fn eval_ratio(&self, a: &[f64], b: &[f64], t: f64) -> Result<f64, BasisError> {
        eval_ratio(self, a, b, t)
    }
}

impl Basis for BasisSpec {
    fn numerator_len(&self) -> usize {
        self.n + 1
    }

    fn denominator_len(&self) -> usize {
        self.m + 1
    }

    fn numerator_into(&self, t: f64, out: &mut [f64]) {
        match self.numerator {
            NumeratorFamily::Monomial => monomials(t, out),
            NumeratorFamily::ChebyshevT => chebyshev_t(t, out),
            NumeratorFamily::SineModulatedMonomial { omega, tau } => {
                monomials(t, out);
                let s = (omega * t + tau).sin();
                out.iter_mut().for_each(|g| *g *= s);
            }
        }
    }

    fn denominator_into(&self, t: f64, out: &mut [f64]) {
        match self.denominator {
            DenominatorFamily::Monomial => monomials(t, out),
            DenominatorFamily::ChebyshevT => chebyshev_t(t, out),
        }
    }

    fn numerator_has_constant(&self) -> bool {
        !matches!(self.numerator, NumeratorFamily::SineModulatedMonomial { .. })
    }
}

fn monomials(t: f64, out: &mut [f64]) {
    let mut p = 1.0;
    for v in out.iter_mut() {
        *v = p;
        p *= t;
    }
}

/// `T_0(t), T_1(t), ...` by the three-term recurrence.
fn chebyshev_t(t: f64, out: &mut [f64]) {
    if let Some(v) = out.get_mut(0) {
        *v = 1.0;
    }
    if let Some(v) = out.get_mut(1) {
        *v = t;
    }
    for k in 2..out.len() {
        out[k] = 2.0 * t * out[k - 1] - out[k - 2];
    }
}

pub fn eval_ratio<B: Basis + ?Sized>(basis: &B, a: &[f64], b: &[f64], t: f64) -> Result<f64, BasisError> {
    if a.len() != basis.numerator_len() {
        return Err(BasisError::CoefficientCount {
            which: "numerator",
            expected: basis.numerator_len(),
            found: a.len(),
        });
    }
    if b.len() != basis.denominator_len() {
        return Err(BasisError::CoefficientCount {
            which: "denominator",
            expected: basis.denominator_len(),
            found: b.len(),
        });
    }
    let mut g = vec![0.0; a.len()];
    let mut h = vec![0.0; b.len()];
    basis.numerator_into(t, &mut g);
    basis.denominator_into(t, &mut h);
    let num: f64 = a.iter().zip(&g).map(|(x, y)| x * y).sum();
    let den: f64 = b.iter().zip(&h).map(|(x, y)| x * y).sum();
    if den == 0.0 {
        return Err(BasisError::ZeroDenominator(t));
    }
    Ok(num / den)
}

/// Affine map from `[c, d]` onto `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalMap {
    pub c: f64,
    pub d: f64,
}

impl IntervalMap {
    pub fn new(c: f64, d: f64) -> Self {
        Self { c, d }
    }

    pub fn identity() -> Self {
        Self { c: -1.0, d: 1.0 }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.c + self.d)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.d - self.c)
    }

    /// Original coordinate to `[-1, 1]`.
    pub fn to_unit(&self, t: f64) -> f64 {
        if self.c == -1.0 && self.d == 1.0 {
            return t;
        }
        (t - self.midpoint()) / self.half_width()
    }

    pub fn from_unit(&self, s: f64) -> f64 {
        if self.c == -1.0 && self.d == 1.0 {
            return s;
        }
        self.midpoint() + self.half_width() * s
    }
}

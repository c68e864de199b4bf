//! Reference computations that share no code with the library: a
//! brute-force coefficient lattice, random targets and synthetic corpora.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// `(2t - (c + d)) / (d - c)`.
pub fn to_unit(t: f64, c: f64, d: f64) -> f64 {
    (2.0 * t - (c + d)) / (d - c)
}

/// `max_i |f_i - P(s_i)/Q(s_i)|` with monomials in `s`, or `None` when
/// some `Q(s_i) < delta`.
pub fn deviation(s: &[f64], f: &[f64], a: &[f64], b: &[f64], delta: f64) -> Option<f64> {
    let horner = |c: &[f64], x: f64| c.iter().rev().fold(0.0, |acc, &v| acc * x + v);
    let mut worst = 0.0_f64;
    for (&x, &fx) in s.iter().zip(f) {
        let q = horner(b, x);
        if q < delta {
            return None;
        }
        worst = worst.max((fx - horner(a, x) / q).abs());
    }
    Some(worst)
}

/// Regular grid of coefficient vectors with `b_0 = 1`, for types with
/// `n + m <= 1`.
pub struct Lattice {
    pub step: f64,
    pub a_range: (f64, f64),
    pub b_range: (f64, f64),
}

fn axis(range: (f64, f64), step: f64) -> Vec<f64> {
    let count = ((range.1 - range.0) / step).round() as i64;
    (0..=count).map(|k| range.0 + k as f64 * step).collect()
}

impl Lattice {
    /// Lattice point of least deviation whose denominator stays above
    /// `delta`, as `(z, a, b)`.
    pub fn best(&self, s: &[f64], f: &[f64], n: usize, m: usize, delta: f64) -> (f64, Vec<f64>, Vec<f64>) {
        assert!(n + m <= 1);
        let a_axis = axis(self.a_range, self.step);
        let b_axis = axis(self.b_range, self.step);
        let mut best = (f64::INFINITY, vec![], vec![]);
        let mut consider = |a: Vec<f64>, b: Vec<f64>| {
            if let Some(z) = deviation(s, f, &a, &b, delta) {
                if z < best.0 {
                    best = (z, a, b);
                }
            }
        };
        for &a0 in &a_axis {
            match (n, m) {
                (0, 0) => consider(vec![a0], vec![1.0]),
                (1, 0) => {
                    for &a1 in &a_axis {
                        consider(vec![a0, a1], vec![1.0]);
                    }
                }
                (0, 1) => {
                    for &b1 in &b_axis {
                        consider(vec![a0], vec![1.0, b1]);
                    }
                }
                _ => unreachable!(),
            }
        }
        best
    }

    /// Nearest lattice point to `(a, b)`.
    pub fn round(&self, a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let snap = |v: f64, r: (f64, f64)| (r.0 + ((v - r.0) / self.step).round() * self.step).clamp(r.0, r.1);
        let a = a.iter().map(|&v| snap(v, self.a_range)).collect();
        let mut bb = vec![1.0];
        bb.extend(b[1..].iter().map(|&v| snap(v, self.b_range)));
        (a, bb)
    }
}

/// Random piecewise-smooth function on `[c, d]` with one jump or kink,
/// scaled so that `max |f| <= 1` on the sample points.
pub fn random_target(rng: &mut ChaCha8Rng, ts: &[f64]) -> Vec<f64> {
    let (c, d) = (ts[0], ts[ts.len() - 1]);
    let brk = c + (d - c) * rng.gen_range(0.2..0.8);
    let left = [rng.gen_range(-1.0..1.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
    let (amp, freq, phase) = (rng.gen_range(0.2..1.5), rng.gen_range(0.5..4.0), rng.gen_range(0.0..6.0));
    let jump = if rng.gen_bool(0.5) { rng.gen_range(-1.0..1.0) } else { 0.0 };
    let raw: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let u = to_unit(t, c, d);
            if t < brk {
                left[0] + left[1] * u + left[2] * u * u
            } else {
                jump + amp * (freq * u + phase).sin() + (left[1] * to_unit(brk, c, d)).abs()
            }
        })
        .collect();
    let scale = raw.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-3);
    raw.into_iter().map(|v| v / scale).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` segments of `len` samples: `sin(omega·s) + N(0, sigma²)` on the
/// unit grid with a random phase offset in `[0, π/8)`.
pub fn noisy_sines(seed: u64, count: usize, len: usize, omega: f64, sigma: f64) -> Vec<Vec<f64>> {
    let mut r = rng(seed);
    let noise = Normal::new(0.0, sigma).unwrap();
    (0..count)
        .map(|_| {
            let phase = r.gen_range(0.0..std::f64::consts::PI / 8.0);
            (0..len)
                .map(|k| {
                    let s = -1.0 + 2.0 * k as f64 / (len - 1) as f64;
                    (omega * s + phase).sin() + noise.sample(&mut r)
                })
                .collect()
        })
        .collect()
}

//! Quadrature weights for the weakly singular kernels `(x - t)^(α-1)`.
//!
//! Both rules replace the smooth factor by its piecewise-linear interpolant and
//! integrate the kernel exactly on every cell, so the weights only depend on
//! index differences on a uniform grid.

use alloc::vec::Vec;

use crate::error::Result;
use crate::grid::Grid;
use crate::math;
use crate::special::gamma;

/// Below this index the weights are evaluated from the closed form; above it a
/// binomial series avoids the cancellation between the large powers.
const SERIES_FROM: usize = 8;

/// Product-trapezoid rule for the Riemann–Liouville integral of order `α > 0`.
///
/// For the left integral at node `i`,
///
/// ```text
/// I^α f(x_i) ≈ h^α / Γ(α+2) · ( s_i f_0 + Σ_{j=1..i} c_{i-j} f_j )
/// c_0 = 1,  c_k = (k+1)^{α+1} - 2 k^{α+1} + (k-1)^{α+1}
/// s_i = (i-1)^{α+1} - (i-1-α) i^α
/// ```
///
/// which is exact whenever `f` is piecewise linear on the grid. The right
/// integral uses the same weights mirrored.
#[derive(Debug, Clone)]
pub struct ProductTrapezoid {
    scale: f64,
    interior: Vec<f64>,
    start: Vec<f64>,
}

impl ProductTrapezoid {
    pub fn new(order: f64, grid: &Grid) -> Result<Self> {
        let n = grid.cells();
        let p = order + 1.0;
        let scale = math::powf(grid.h(), order) / gamma(order + 2.0)?;
        let interior = (0..=n).map(|k| second_difference(p, k)).collect();
        let start = (0..=n).map(|i| start_weight(order, i)).collect();
        Ok(Self {
            scale,
            interior,
            start,
        })
    }

    /// Entry `(i, j)` of the left-integral matrix, scale included.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        if i == 0 || j > i {
            0.0
        } else if j == 0 {
            self.scale * self.start[i]
        } else {
            self.scale * self.interior[i - j]
        }
    }

    pub fn apply_left(&self, f: &[f64]) -> Vec<f64> {
        let n = f.len() - 1;
        let mut out = alloc::vec![0.0; n + 1];
        for (i, slot) in out.iter_mut().enumerate().skip(1) {
            let tail: f64 = f[1..=i]
                .iter()
                .zip(self.interior[..i].iter().rev())
                .map(|(fj, c)| fj * c)
                .sum();
            *slot = self.scale * (self.start[i] * f[0] + tail);
        }
        out
    }

    pub fn apply_right(&self, f: &[f64]) -> Vec<f64> {
        let n = f.len() - 1;
        let mut out = alloc::vec![0.0; n + 1];
        for (i, slot) in out.iter_mut().enumerate().take(n) {
            let head: f64 = f[i..n]
                .iter()
                .zip(&self.interior[..n - i])
                .map(|(fj, c)| fj * c)
                .sum();
            *slot = self.scale * (head + self.start[n - i] * f[n]);
        }
        out
    }

    /// Transpose of the left-integral matrix applied to `u`.
    pub fn apply_left_transpose(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len() - 1;
        let mut out = alloc::vec![0.0; n + 1];
        out[0] = self.scale
            * u.iter()
                .zip(&self.start)
                .skip(1)
                .map(|(ui, s)| ui * s)
                .sum::<f64>();
        for (j, slot) in out.iter_mut().enumerate().skip(1) {
            let s: f64 = u[j..]
                .iter()
                .zip(&self.interior)
                .map(|(ui, c)| ui * c)
                .sum();
            *slot = self.scale * s;
        }
        out
    }
}

/// L1 weights: the Caputo derivative of the piecewise-linear interpolant,
/// `I^{1-α}` of a piecewise-constant derivative integrated exactly.
///
/// ```text
/// cD^α f(x_i) ≈ h^{-α} / Γ(2-α) · Σ_{j=0..i-1} b_{i-1-j} (f_{j+1} - f_j)
/// b_k = (k+1)^{1-α} - k^{1-α}
/// ```
#[derive(Debug, Clone)]
pub struct L1Weights {
    scale: f64,
    increments: Vec<f64>,
}

impl L1Weights {
    /// `order` must lie in (0, 1).
    pub fn new(order: f64, grid: &Grid) -> Result<Self> {
        let n = grid.cells();
        let gamma_exp = 1.0 - order;
        let scale = math::powf(grid.h(), -order) / gamma(2.0 - order)?;
        let increments = (0..n)
            .map(|k| {
                if k == 0 {
                    1.0
                } else {
                    let kf = k as f64;
                    math::powf(kf, gamma_exp) * math::expm1(gamma_exp * math::ln_1p(1.0 / kf))
                }
            })
            .collect();
        Ok(Self { scale, increments })
    }

    pub fn apply_left(&self, f: &[f64]) -> Vec<f64> {
        let n = f.len() - 1;
        let diffs: Vec<f64> = f.windows(2).map(|w| w[1] - w[0]).collect();
        let mut out = alloc::vec![0.0; n + 1];
        for (i, slot) in out.iter_mut().enumerate().skip(1) {
            let s: f64 = diffs[..i]
                .iter()
                .zip(self.increments[..i].iter().rev())
                .map(|(d, b)| d * b)
                .sum();
            *slot = self.scale * s;
        }
        out
    }

    /// Right Caputo derivative, sign included: `cD^α_{b-} f = -I^{1-α}_{b-} f'`.
    pub fn apply_right(&self, f: &[f64]) -> Vec<f64> {
        let n = f.len() - 1;
        let diffs: Vec<f64> = f.windows(2).map(|w| w[1] - w[0]).collect();
        let mut out = alloc::vec![0.0; n + 1];
        for (i, slot) in out.iter_mut().enumerate().take(n) {
            let s: f64 = diffs[i..]
                .iter()
                .zip(&self.increments[..n - i])
                .map(|(d, b)| d * b)
                .sum();
            *slot = -self.scale * s;
        }
        out
    }
}

/// `(k+1)^p - 2 k^p + (k-1)^p`, with `c_0 = 1`.
fn second_difference(p: f64, k: usize) -> f64 {
    match k {
        0 => 1.0,
        1 => math::powf(2.0, p) - 2.0,
        k if k < SERIES_FROM => {
            let kf = k as f64;
            math::powf(kf + 1.0, p) - 2.0 * math::powf(kf, p) + math::powf(kf - 1.0, p)
        }
        k => {
            let kf = k as f64;
            let u = 1.0 / kf;
            math::powf(kf, p) * (binomial_tail(p, u) + binomial_tail(p, -u))
        }
    }
}

/// `(i-1)^{α+1} - (i-1-α) i^α`; zero at `i = 0` (unused).
fn start_weight(order: f64, i: usize) -> f64 {
    let p = order + 1.0;
    match i {
        0 => 0.0,
        i if i < SERIES_FROM => {
            let f = i as f64;
            math::powf(f - 1.0, p) - (f - 1.0 - order) * math::powf(f, order)
        }
        i => {
            let f = i as f64;
            math::powf(f, p) * binomial_tail(p, -1.0 / f)
        }
    }
}

/// `Σ_{m≥2} C(p, m) t^m = (1+t)^p - 1 - p t` for `|t| ≤ 1/8`.
fn binomial_tail(p: f64, t: f64) -> f64 {
    let mut term = 0.5 * p * (p - 1.0) * t * t;
    let mut sum = term;
    let mut m = 2.0;
    while m < 80.0 {
        term *= (p - m) / (m + 1.0) * t;
        sum += term;
        if math::abs(term) <= 1e-18 * math::abs(sum) {
            break;
        }
        m += 1.0;
    }
    sum
}

//! Numerical checks of the classical fractional-operator identities.
//!
//! Each `*_defect` function returns the pointwise discrepancy of one identity
//! for a given input; [`Admissible`] decides which nodes are measured, and
//! [`run_suite`] evaluates all identities on random inputs at two resolutions.
//!
//! Near the endpoint where the kernel is singular, the discrete error of these
//! identities is self-similar in `h`: for power-law data the value at node `i`
//! is `h^γ g(i)` in both the exact and the discrete result, so the relative
//! error at a fixed node index never improves with refinement. Convergence is
//! therefore measured outside a fixed physical boundary layer.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    caputo_left, caputo_right, gamma, operator_norm_bound, rl_derivative_left, rl_derivative_right,
    rl_integral_left, rl_integral_right, FractionalOrder,
};
use crate::error::Result;
use crate::grid::{Grid, SampledFunction};
use crate::math;

/// Endpoint at which a one-sided operator's kernel is singular.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Node filter for identity measurements.
///
/// Always drops each endpoint and the `edge_nodes` nodes next to it; on the
/// singular side it also drops the layer of width `layer_fraction · (b - a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissible {
    pub edge_nodes: usize,
    pub layer_fraction: f64,
}

impl Default for Admissible {
    fn default() -> Self {
        Self {
            edge_nodes: 2,
            layer_fraction: 1.0 / 16.0,
        }
    }
}

impl Admissible {
    /// Only the fixed node-count exclusion, no physical layer.
    pub fn edges_only() -> Self {
        Self {
            edge_nodes: 2,
            layer_fraction: 0.0,
        }
    }

    pub fn contains(&self, grid: &Grid, i: usize, side: Side) -> bool {
        let n = grid.cells();
        if i <= self.edge_nodes || i + self.edge_nodes >= n {
            return false;
        }
        let layer = self.layer_fraction * grid.width();
        match side {
            Side::Left => grid.node(i) - grid.a() >= layer,
            Side::Right => grid.b() - grid.node(i) >= layer,
        }
    }

    pub fn max_abs(&self, f: &SampledFunction, side: Side) -> f64 {
        let grid = f.grid();
        f.values()
            .iter()
            .enumerate()
            .filter(|(i, _)| self.contains(grid, *i, side))
            .fold(0.0, |m, (_, v)| f64::max(m, math::abs(*v)))
    }

    /// Largest pointwise relative error `|got - exact| / |exact|`.
    pub fn max_relative(&self, got: &SampledFunction, exact: &SampledFunction, side: Side) -> f64 {
        let grid = got.grid();
        got.values()
            .iter()
            .zip(exact.values())
            .enumerate()
            .filter(|(i, _)| self.contains(grid, *i, side))
            .fold(0.0, |m, (_, (g, e))| f64::max(m, math::abs((g - e) / e)))
    }
}

/// Errors at two resolutions, `n` and `2n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convergence {
    pub coarse: f64,
    pub fine: f64,
}

impl Convergence {
    /// Errors below this are treated as exact (rounding level).
    pub const EXACT: f64 = 1e-11;

    pub fn ratio(&self) -> f64 {
        self.coarse / self.fine
    }

    /// True when the rule is exact for the input, so the ratio is noise.
    pub fn is_exact(&self) -> bool {
        self.coarse <= Self::EXACT && self.fine <= Self::EXACT
    }

    /// Error ratio at least `min_ratio`, or exact to rounding.
    pub fn converges(&self, min_ratio: f64) -> bool {
        self.is_exact() || self.ratio() >= min_ratio
    }
}

/// The four power-law identities for `(t-a)^{β-1}` and `(b-t)^{β-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerLaw {
    IntegralLeft,
    DerivativeLeft,
    IntegralRight,
    DerivativeRight,
}

impl PowerLaw {
    pub const ALL: [PowerLaw; 4] = [
        PowerLaw::IntegralLeft,
        PowerLaw::DerivativeLeft,
        PowerLaw::IntegralRight,
        PowerLaw::DerivativeRight,
    ];

    pub fn side(self) -> Side {
        match self {
            PowerLaw::IntegralLeft | PowerLaw::DerivativeLeft => Side::Left,
            PowerLaw::IntegralRight | PowerLaw::DerivativeRight => Side::Right,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PowerLaw::IntegralLeft => "I_{a+} power law",
            PowerLaw::DerivativeLeft => "D_{a+} power law",
            PowerLaw::IntegralRight => "I_{b-} power law",
            PowerLaw::DerivativeRight => "D_{b-} power law",
        }
    }

    fn is_integral(self) -> bool {
        matches!(self, PowerLaw::IntegralLeft | PowerLaw::IntegralRight)
    }
}

/// Computed and exact images of `(t-a)^{β-1}` (or its mirror) under the operator.
///
/// Requires `β ≥ 1` so that the input samples are finite.
pub fn power_law_pair(
    law: PowerLaw,
    alpha: FractionalOrder,
    beta: f64,
    grid: &Grid,
) -> Result<(SampledFunction, SampledFunction)> {
    let (a, b) = (grid.a(), grid.b());
    let distance = move |x: f64| match law.side() {
        Side::Left => x - a,
        Side::Right => b - x,
    };
    let f = grid.sample(|x| math::powf(distance(x), beta - 1.0))?;
    let shift = if law.is_integral() {
        alpha.value()
    } else {
        -alpha.value()
    };
    let c = gamma(beta)? / gamma(beta + shift)?;
    let exponent = beta + shift - 1.0;
    // Exact values at the singular endpoint may be infinite; those nodes are
    // never admissible, so clamp them to keep the samples finite.
    let exact = grid.sample(|x| {
        let d = distance(x);
        if d > 0.0 {
            c * math::powf(d, exponent)
        } else {
            0.0
        }
    })?;
    let got = match law {
        PowerLaw::IntegralLeft => rl_integral_left(&f, alpha)?,
        PowerLaw::IntegralRight => rl_integral_right(&f, alpha)?,
        PowerLaw::DerivativeLeft => rl_derivative_left(&f, alpha)?,
        PowerLaw::DerivativeRight => rl_derivative_right(&f, alpha)?,
    };
    Ok((got, exact))
}

/// `I^α I^β f - I^{α+β} f`.
pub fn semigroup_defect(
    f: &SampledFunction,
    alpha: FractionalOrder,
    beta: FractionalOrder,
    side: Side,
) -> Result<SampledFunction> {
    let sum = FractionalOrder::new(alpha.value() + beta.value())?;
    let integral = integral_on(side);
    integral(&integral(f, beta)?, alpha)?.sub(&integral(f, sum)?)
}

/// `D^α I^α f - f` (Riemann–Liouville derivative as left inverse).
pub fn left_inverse_defect(
    f: &SampledFunction,
    alpha: FractionalOrder,
    side: Side,
) -> Result<SampledFunction> {
    let g = integral_on(side)(f, alpha)?;
    let d = match side {
        Side::Left => rl_derivative_left(&g, alpha)?,
        Side::Right => rl_derivative_right(&g, alpha)?,
    };
    d.sub(f)
}

/// `cD^α I^α f - f`.
pub fn caputo_inverse_defect(
    f: &SampledFunction,
    alpha: FractionalOrder,
    side: Side,
) -> Result<SampledFunction> {
    let g = integral_on(side)(f, alpha)?;
    let d = match side {
        Side::Left => caputo_left(&g, None, alpha)?,
        Side::Right => caputo_right(&g, None, alpha)?,
    };
    d.sub(f)
}

/// `I^α cD^α f - (f - f(endpoint))`.
pub fn fundamental_defect(
    f: &SampledFunction,
    alpha: FractionalOrder,
    side: Side,
) -> Result<SampledFunction> {
    let (d, anchor) = match side {
        Side::Left => (caputo_left(f, None, alpha)?, f.first()),
        Side::Right => (caputo_right(f, None, alpha)?, f.last()),
    };
    let back = integral_on(side)(&d, alpha)?;
    back.sub(&f.map(|v| v - anchor)?)
}

/// `D^β I^α f - I^{α-β} f` for `α > β`, `β ≤ 1`.
pub fn composition_defect(
    f: &SampledFunction,
    alpha: FractionalOrder,
    beta: FractionalOrder,
    side: Side,
) -> Result<SampledFunction> {
    let diff = FractionalOrder::new(alpha.value() - beta.value())?;
    let integral = integral_on(side);
    let g = integral(f, alpha)?;
    let d = match side {
        Side::Left => rl_derivative_left(&g, beta)?,
        Side::Right => rl_derivative_right(&g, beta)?,
    };
    d.sub(&integral(f, diff)?)
}

/// Defect of the fractional integration-by-parts formula
///
/// ```text
/// ∫ f D^α_{a+} g dx = ∫ g cD^α_{b-} f dx + [ f I^{1-α}_{a+} g ]_a^b
/// ```
///
/// `D^α_{a+} g` is split into its Caputo part and the endpoint term
/// `g(a) (x-a)^{-α} / Γ(1-α)`; the latter is integrated against `f` with the
/// product rule, `∫ f (x-a)^{-α} dx / Γ(1-α) = I^{1-α}_{b-} f (a)`.
pub fn integration_by_parts_defect(
    f: &SampledFunction,
    g: &SampledFunction,
    alpha: FractionalOrder,
) -> Result<f64> {
    f.check_same_grid(g)?;
    let complement = FractionalOrder::new(1.0 - alpha.value())?;
    let regular = caputo_left(g, None, alpha)?;
    let singular = g.first() * rl_integral_right(f, complement)?.first();
    let lhs = f.mul(&regular)?.trapezoid() + singular;

    let right_caputo = caputo_right(f, None, alpha)?;
    let flux = rl_integral_left(g, complement)?;
    let boundary = f.last() * flux.last() - f.first() * flux.first();
    let rhs = g.mul(&right_caputo)?.trapezoid() + boundary;
    Ok(math::abs(lhs - rhs))
}

/// `‖I^β_{a+} f‖ / (K_β ‖f‖)` in the trapezoid L² norm.
pub fn norm_ratio(f: &SampledFunction, beta: FractionalOrder) -> Result<f64> {
    let grid = f.grid();
    let k = operator_norm_bound(beta, grid.a(), grid.b())?;
    let image = rl_integral_left(f, beta)?;
    Ok(image.l2_norm() / (k * f.l2_norm()))
}

/// Largest singular value of the discrete `I^β_{a+}` in the trapezoid-weighted
/// inner product, by power iteration (a lower estimate after finitely many steps).
pub fn discrete_operator_norm(
    grid: &Grid,
    beta: FractionalOrder,
    iterations: usize,
) -> Result<f64> {
    let rule = super::weights::ProductTrapezoid::new(beta.value(), grid)?;
    let h = grid.h();
    let n = grid.cells();
    let weight = |i: usize| if i == 0 || i == n { 0.5 * h } else { h };
    // With W = diag(weights), σ_max² is the top eigenvalue of W^{-1} Mᵀ W M.
    let mut v: Vec<f64> = (0..=n).map(|i| 1.0 + 0.1 * math::sin(i as f64)).collect();
    let mut sigma = 0.0;
    for _ in 0..iterations.max(1) {
        let norm_v = weighted_norm(&v, &weight);
        v.iter_mut().for_each(|x| *x /= norm_v);
        let mv = rule.apply_left(&v);
        sigma = weighted_norm(&mv, &weight);
        let wmv: Vec<f64> = mv.iter().enumerate().map(|(i, x)| weight(i) * x).collect();
        let back = rule.apply_left_transpose(&wmv);
        v = back
            .iter()
            .enumerate()
            .map(|(i, x)| x / weight(i))
            .collect();
    }
    Ok(sigma)
}

fn weighted_norm(v: &[f64], weight: &impl Fn(usize) -> f64) -> f64 {
    math::sqrt(v.iter().enumerate().map(|(i, x)| weight(i) * x * x).sum())
}

type IntegralFn = fn(&SampledFunction, FractionalOrder) -> Result<SampledFunction>;

fn integral_on(side: Side) -> IntegralFn {
    match side {
        Side::Left => rl_integral_left,
        Side::Right => rl_integral_right,
    }
}

/// Random cubic `c0 + c1 x + c2 x² + c3 x³` with coefficients in `[-1, 1]`.
pub fn random_cubic(rng: &mut impl Rng) -> [f64; 4] {
    [
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
    ]
}

pub fn eval_polynomial(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// One line of the identity suite.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub name: String,
    /// Largest admissible error over all sampled inputs, at `n` and `2n`.
    pub error: Convergence,
    /// Pass threshold applied to `error.coarse`.
    pub tolerance: f64,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.error.coarse <= self.tolerance && self.error.converges(1.6)
    }
}

/// Runs every identity on `[0, 1]` at `grid_n` and `2 grid_n` cells.
///
/// Inputs are random cubics drawn from a ChaCha stream seeded with `seed`.
pub fn run_suite(grid_n: usize, seed: u64) -> Result<Vec<IdentityReport>> {
    let coarse = Grid::new(0.0, 1.0, grid_n)?;
    let fine = coarse.refined();
    let admissible = Admissible::default();
    let orders = [0.3, 0.5, 0.7];
    let mut reports = Vec::new();
    let mut push = |name: &str, coarse: f64, fine: f64, tolerance: f64| {
        reports.push(IdentityReport {
            name: name.into(),
            error: Convergence { coarse, fine },
            tolerance,
        });
    };

    for law in PowerLaw::ALL {
        let mut worst = [0.0f64; 2];
        for &alpha in &orders {
            for &beta in &[1.2, 1.5, 2.0] {
                let alpha = FractionalOrder::new(alpha)?;
                for (slot, grid) in worst.iter_mut().zip([&coarse, &fine]) {
                    let (got, exact) = power_law_pair(law, alpha, beta, grid)?;
                    *slot = slot.max(admissible.max_relative(&got, &exact, law.side()));
                }
            }
        }
        push(law.name(), worst[0], worst[1], 1e-3);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cubics: Vec<[f64; 4]> = (0..4).map(|_| random_cubic(&mut rng)).collect();
    let sample = |grid: &Grid, c: &[f64; 4]| grid.sample(|x| eval_polynomial(c, x));

    type Defect = fn(&SampledFunction, FractionalOrder, Side) -> Result<SampledFunction>;
    let single: [(&str, Defect); 3] = [
        ("D^a I^a f = f", left_inverse_defect),
        ("cD^a I^a f = f", caputo_inverse_defect),
        ("I^a cD^a f = f - f(a)", fundamental_defect),
    ];
    for (name, defect) in single {
        let mut worst = [0.0f64; 2];
        for c in &cubics {
            for &alpha in &orders {
                let alpha = FractionalOrder::new(alpha)?;
                for side in [Side::Left, Side::Right] {
                    for (slot, grid) in worst.iter_mut().zip([&coarse, &fine]) {
                        let d = defect(&sample(grid, c)?, alpha, side)?;
                        *slot = slot.max(admissible.max_abs(&d, side));
                    }
                }
            }
        }
        push(name, worst[0], worst[1], 5e-3);
    }

    let pairs = [(0.3, 0.4), (0.4, 0.6), (0.6, 0.3), (0.6, 0.6)];
    let mut semigroup = [0.0f64; 2];
    let mut composition = [0.0f64; 2];
    for c in &cubics {
        for &(alpha, beta) in &pairs {
            let (alpha, beta) = (FractionalOrder::new(alpha)?, FractionalOrder::new(beta)?);
            for side in [Side::Left, Side::Right] {
                for (k, grid) in [&coarse, &fine].into_iter().enumerate() {
                    let f = sample(grid, c)?;
                    let d = semigroup_defect(&f, alpha, beta, side)?;
                    semigroup[k] = semigroup[k].max(admissible.max_abs(&d, side));
                    // D^β I^{α+β} f = I^α f
                    let sum = FractionalOrder::new(alpha.value() + beta.value())?;
                    if beta.value() < 1.0 {
                        let d = composition_defect(&f, sum, beta, side)?;
                        composition[k] = composition[k].max(admissible.max_abs(&d, side));
                    }
                }
            }
        }
    }
    push("I^a I^b f = I^(a+b) f", semigroup[0], semigroup[1], 5e-3);
    push(
        "D^b I^a f = I^(a-b) f",
        composition[0],
        composition[1],
        5e-3,
    );

    let mut ibp = [0.0f64; 2];
    for _ in 0..4 {
        let mut fc = random_cubic(&mut rng);
        fc[0] = 3.0;
        let gc = random_cubic(&mut rng);
        for &alpha in &orders {
            let alpha = FractionalOrder::new(alpha)?;
            for (slot, grid) in ibp.iter_mut().zip([&coarse, &fine]) {
                let d =
                    integration_by_parts_defect(&sample(grid, &fc)?, &sample(grid, &gc)?, alpha)?;
                *slot = slot.max(d);
            }
        }
    }
    push("integration by parts", ibp[0], ibp[1], 5e-3);

    // Ratio to K_β: must stay below one; not a convergence measurement.
    let mut worst_ratio = 0.0f64;
    for _ in 0..10 {
        let values: Vec<f64> = (0..=grid_n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let f = SampledFunction::new(coarse, values)?;
        for &beta in &[0.25, 0.5, 0.75] {
            worst_ratio = worst_ratio.max(norm_ratio(&f, FractionalOrder::new(beta)?)?);
        }
    }
    reports.push(IdentityReport {
        name: "||I^b f|| / (K_b ||f||)".into(),
        error: Convergence {
            coarse: worst_ratio,
            fine: 0.0,
        },
        tolerance: 1.0 + 1e-6,
    });
    Ok(reports)
}

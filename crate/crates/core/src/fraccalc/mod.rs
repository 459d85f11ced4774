//! Discrete fractional calculus on uniform grids.
//!
//! Riemann–Liouville integrals use the product-trapezoid rule of
//! [`weights::ProductTrapezoid`]: the integrand is interpolated piecewise
//! linearly and the singular kernel is integrated exactly on every cell.
//! Derivatives are built on the same idea. When no derivative samples are
//! supplied, the Caputo derivative is the exact Caputo derivative of the
//! piecewise-linear interpolant (the L1 rule), and the Riemann–Liouville
//! derivative adds the analytic endpoint term `f(a) (x-a)^{-α} / Γ(1-α)`.
//!
//! Every operator maps a [`SampledFunction`] to one on the same grid. Order
//! one is admitted for derivatives and reduces to the classical derivative
//! (second-order central differences), which is what the classical-limit mode
//! of the solver needs.

pub mod identities;
pub mod weights;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::SampledFunction;
use crate::math;
pub use crate::special::gamma;
use weights::{L1Weights, ProductTrapezoid};

/// Order α of a fractional operator.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    /// Any finite `α > 0`; operators check their own admissible range.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidOrder(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// True for α = 1, where the Caputo derivative is the ordinary one.
    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }

    fn require_derivative_order(self, op: &'static str) -> Result<()> {
        if self.0 <= 1.0 {
            Ok(())
        } else {
            Err(Error::OrderOutOfRange {
                op,
                range: "(0, 1]",
                order: self.0,
            })
        }
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

/// Left Riemann–Liouville integral `I^α_{a+} f`; zero at `a`.
pub fn rl_integral_left(f: &SampledFunction, order: FractionalOrder) -> Result<SampledFunction> {
    let rule = ProductTrapezoid::new(order.value(), f.grid())?;
    SampledFunction::new(*f.grid(), rule.apply_left(f.values()))
}

/// Right Riemann–Liouville integral `I^α_{b-} f`; zero at `b`.
pub fn rl_integral_right(f: &SampledFunction, order: FractionalOrder) -> Result<SampledFunction> {
    let rule = ProductTrapezoid::new(order.value(), f.grid())?;
    SampledFunction::new(*f.grid(), rule.apply_right(f.values()))
}

/// Left Caputo derivative `cD^α_{a+} f = I^{1-α}_{a+} f'`, `0 < α ≤ 1`.
///
/// With `f_prime` the derivative samples are integrated by the product
/// trapezoid rule; without it the L1 rule differentiates the interpolant of
/// `f` exactly.
pub fn caputo_left(
    f: &SampledFunction,
    f_prime: Option<&SampledFunction>,
    order: FractionalOrder,
) -> Result<SampledFunction> {
    order.require_derivative_order("caputo_left")?;
    if let Some(d) = f_prime {
        f.check_same_grid(d)?;
    }
    match (order.is_classical(), f_prime) {
        (true, Some(d)) => Ok(d.clone()),
        (true, None) => central_difference(f),
        (false, Some(d)) => rl_integral_left(d, complement(order)),
        (false, None) => {
            let rule = L1Weights::new(order.value(), f.grid())?;
            SampledFunction::new(*f.grid(), rule.apply_left(f.values()))
        }
    }
}

/// Right Caputo derivative `cD^α_{b-} f = -I^{1-α}_{b-} f'`, `0 < α ≤ 1`.
pub fn caputo_right(
    f: &SampledFunction,
    f_prime: Option<&SampledFunction>,
    order: FractionalOrder,
) -> Result<SampledFunction> {
    order.require_derivative_order("caputo_right")?;
    if let Some(d) = f_prime {
        f.check_same_grid(d)?;
    }
    match (order.is_classical(), f_prime) {
        (true, Some(d)) => Ok(d.scaled(-1.0)),
        (true, None) => Ok(central_difference(f)?.scaled(-1.0)),
        (false, Some(d)) => Ok(rl_integral_right(d, complement(order))?.scaled(-1.0)),
        (false, None) => {
            let rule = L1Weights::new(order.value(), f.grid())?;
            SampledFunction::new(*f.grid(), rule.apply_right(f.values()))
        }
    }
}

/// Left Riemann–Liouville derivative `D^α_{a+} f = D I^{1-α}_{a+} f`.
///
/// Computed as `cD^α_{a+} f + f(a) (x-a)^{-α} / Γ(1-α)`, i.e. the exact
/// derivative of `I^{1-α}` applied to the piecewise-linear interpolant. The
/// endpoint term is singular at `a`; node 0 carries its mean over the first
/// cell, `f(a) h^{-α} / Γ(2-α)`, and should not be trusted.
pub fn rl_derivative_left(f: &SampledFunction, order: FractionalOrder) -> Result<SampledFunction> {
    order.require_derivative_order("rl_derivative_left")?;
    let caputo = caputo_left(f, None, order)?;
    if order.is_classical() {
        return Ok(caputo);
    }
    with_endpoint_term(caputo, f.first(), order, |i| i)
}

/// Right Riemann–Liouville derivative `D^α_{b-} f = -D I^{1-α}_{b-} f`.
///
/// Mirror of [`rl_derivative_left`]: `cD^α_{b-} f + f(b) (b-x)^{-α} / Γ(1-α)`,
/// with node `n` holding the cell mean of the singular term.
pub fn rl_derivative_right(f: &SampledFunction, order: FractionalOrder) -> Result<SampledFunction> {
    order.require_derivative_order("rl_derivative_right")?;
    let caputo = caputo_right(f, None, order)?;
    if order.is_classical() {
        return Ok(caputo);
    }
    let n = f.grid().cells();
    with_endpoint_term(caputo, f.last(), order, |i| n - i)
}

/// `K_α = (b-a)^α / Γ(α+1)`, the bound of `I^α_{a+}` on `L^p(a, b)`.
pub fn operator_norm_bound(order: FractionalOrder, a: f64, b: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidInterval { a, b });
    }
    Ok(math::powf(b - a, order.value()) / gamma(order.value() + 1.0)?)
}

/// Second-order central differences, one-sided second-order at the ends.
pub fn central_difference(f: &SampledFunction) -> Result<SampledFunction> {
    let v = f.values();
    let n = v.len() - 1;
    let h = f.grid().h();
    let mut d = Vec::with_capacity(n + 1);
    d.push((-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h));
    d.extend(v.windows(3).map(|w| (w[2] - w[0]) / (2.0 * h)));
    d.push((3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h));
    SampledFunction::new(*f.grid(), d)
}

fn complement(order: FractionalOrder) -> FractionalOrder {
    FractionalOrder(1.0 - order.value())
}

/// Adds `c (distance)^{-α} / Γ(1-α)`, where `distance(i)` counts cells from
/// the singular endpoint.
fn with_endpoint_term(
    base: SampledFunction,
    c: f64,
    order: FractionalOrder,
    distance: impl Fn(usize) -> usize,
) -> Result<SampledFunction> {
    if c == 0.0 {
        return Ok(base);
    }
    let alpha = order.value();
    let grid = *base.grid();
    let h = grid.h();
    let g1 = gamma(1.0 - alpha)?;
    let g2 = gamma(2.0 - alpha)?;
    let mut values = base.into_values();
    for (i, v) in values.iter_mut().enumerate() {
        let k = distance(i);
        *v += if k == 0 {
            c * math::powf(h, -alpha) / g2
        } else {
            c * math::powf(k as f64 * h, -alpha) / g1
        };
    }
    SampledFunction::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn order(v: f64) -> FractionalOrder {
        FractionalOrder::new(v).unwrap()
    }

    fn max_rel_error(
        got: &SampledFunction,
        exact: impl Fn(f64) -> f64,
        keep: impl Fn(f64) -> bool,
    ) -> f64 {
        let grid = got.grid();
        grid.nodes()
            .zip(got.values())
            .filter(|(x, _)| keep(*x))
            .map(|(x, v)| ((v - exact(x)) / exact(x)).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn rejects_nonpositive_orders() {
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(-0.3).is_err());
        assert!(FractionalOrder::new(f64::NAN).is_err());
    }

    #[test]
    fn integral_of_half_power() {
        // I^0.5 (t)^0.5 = Γ(1.5)/Γ(2) x
        let grid = Grid::new(0.0, 1.0, 2048).unwrap();
        let f = grid.sample(libm::sqrt).unwrap();
        let got = rl_integral_left(&f, order(0.5)).unwrap();
        let c = gamma(1.5).unwrap() / gamma(2.0).unwrap();
        assert!((c - 0.886_226_925_452_758).abs() < 1e-14);
        assert_eq!(got.first(), 0.0);
        let err = max_rel_error(&got, |x| c * x, |x| x >= 1.0 / 16.0);
        assert!(err <= 1e-3, "max relative error {err}");
    }

    #[test]
    fn order_one_integral_of_one_is_x() {
        let grid = Grid::new(0.0, 1.0, 64).unwrap();
        let one = grid.sample(|_| 1.0).unwrap();
        let left = rl_integral_left(&one, order(1.0)).unwrap();
        let right = rl_integral_right(&one, order(1.0)).unwrap();
        for (i, x) in grid.nodes().enumerate() {
            assert!((left.values()[i] - x).abs() < 1e-15);
            assert!((right.values()[i] - (1.0 - x)).abs() < 1e-15);
        }
    }

    #[test]
    fn right_integral_of_half_power() {
        let grid = Grid::new(0.0, 1.0, 2048).unwrap();
        let f = grid.sample(|t| libm::sqrt(1.0 - t)).unwrap();
        let got = rl_integral_right(&f, order(0.5)).unwrap();
        let c = gamma(1.5).unwrap();
        assert_eq!(got.last(), 0.0);
        let err = max_rel_error(&got, |x| c * (1.0 - x), |x| x <= 1.0 - 1.0 / 16.0);
        assert!(err <= 1e-3, "max relative error {err}");
    }

    #[test]
    fn sine_integral_converges_to_fine_reference() {
        // Reference: the same rule on 2^16 cells; every coarse node is a fine node.
        let alpha = order(0.3);
        let fine_grid = Grid::new(0.0, PI, 1 << 16).unwrap();
        let fine = rl_integral_left(&fine_grid.sample(libm::sin).unwrap(), alpha).unwrap();
        let mut previous = f64::INFINITY;
        for n in [256usize, 512, 1024] {
            let grid = Grid::new(0.0, PI, n).unwrap();
            let coarse = rl_integral_left(&grid.sample(libm::sin).unwrap(), alpha).unwrap();
            let stride = (1 << 16) / n;
            let err = (0..=n)
                .map(|i| (coarse.values()[i] - fine.values()[i * stride]).abs())
                .fold(0.0, f64::max);
            assert!(err < previous / 1.6, "n={n}: {err} vs {previous}");
            previous = err;
        }
        assert!(previous < 1e-5);
    }

    #[test]
    fn caputo_of_constant_vanishes() {
        let grid = Grid::new(-1.0, 2.0, 100).unwrap();
        let c = grid.sample(|_| 3.5).unwrap();
        for alpha in [0.3, 0.75, 1.0] {
            assert!(caputo_left(&c, None, order(alpha)).unwrap().max_abs() < 1e-12);
            assert!(caputo_right(&c, None, order(alpha)).unwrap().max_abs() < 1e-12);
        }
    }

    #[test]
    fn caputo_of_linear_is_power() {
        // cD^α (t-a) = (x-a)^{1-α} / Γ(2-α)
        let grid = Grid::new(0.5, 1.5, 2048).unwrap();
        for alpha in [0.2, 0.5, 0.8] {
            let f = grid.sample(|t| t - 0.5).unwrap();
            let exact = |x: f64| libm::pow(x - 0.5, 1.0 - alpha) / libm::tgamma(2.0 - alpha);
            for derivative in [None, Some(grid.sample(|_| 1.0).unwrap())] {
                let got = caputo_left(&f, derivative.as_ref(), order(alpha)).unwrap();
                assert!(max_rel_error(&got, exact, |x| x > 0.5) <= 1e-3);
            }
            let g = grid.sample(|t| 1.5 - t).unwrap();
            let got = caputo_right(&g, None, order(alpha)).unwrap();
            let exact_r = |x: f64| libm::pow(1.5 - x, 1.0 - alpha) / libm::tgamma(2.0 - alpha);
            assert!(max_rel_error(&got, exact_r, |x| x < 1.5) <= 1e-3);
        }
    }

    #[test]
    fn caputo_of_sine_with_analytic_derivative() {
        let alpha = order(0.75);
        let run = |n: usize| {
            let grid = Grid::new(0.0, PI, n).unwrap();
            let f = grid.sample(|t| libm::sin(2.0 * t)).unwrap();
            let df = grid.sample(|t| 2.0 * libm::cos(2.0 * t)).unwrap();
            caputo_left(&f, Some(&df), alpha).unwrap()
        };
        let fine = run(1 << 16);
        let coarse = run(1024);
        let stride = (1 << 16) / 1024;
        let err = (0..=1024)
            .map(|i| (coarse.values()[i] - fine.values()[i * stride]).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-5, "{err}");
        // The L1 rule on samples alone agrees with the analytic-derivative route.
        let grid = Grid::new(0.0, PI, 1024).unwrap();
        let f = grid.sample(|t| libm::sin(2.0 * t)).unwrap();
        let l1 = caputo_left(&f, None, alpha).unwrap();
        assert!(l1.sub(&coarse).unwrap().max_abs() < 2e-3);
    }

    #[test]
    fn caputo_right_mirrors_left() {
        let grid = Grid::new(0.0, 2.0, 300).unwrap();
        let f = grid.sample(|t| libm::exp(t) * libm::cos(3.0 * t)).unwrap();
        let df = grid
            .sample(|t| libm::exp(t) * (libm::cos(3.0 * t) - 3.0 * libm::sin(3.0 * t)))
            .unwrap();
        let alpha = order(0.6);
        let right = caputo_right(&f, None, alpha).unwrap();
        // f(a+b-x) has derivative -f'(a+b-x), and cD_{b-} f(x) = cD_{a+} g(a+b-x).
        let mirrored = caputo_left(&f.reflected(), None, alpha)
            .unwrap()
            .reflected();
        assert!(right.sub(&mirrored).unwrap().max_abs() < 1e-9);
        let right_exact_derivative = caputo_right(&f, Some(&df), alpha).unwrap();
        let mirrored_exact = caputo_left(&f.reflected(), Some(&df.reflected().scaled(-1.0)), alpha)
            .unwrap()
            .reflected();
        assert!(
            right_exact_derivative
                .sub(&mirrored_exact)
                .unwrap()
                .max_abs()
                < 1e-9
        );
    }

    #[test]
    fn rl_derivative_of_power() {
        // D^0.5 t^0.2 = Γ(1.2)/Γ(0.7) x^{-0.3}, away from the singular endpoint.
        let grid = Grid::new(0.0, 1.0, 4096).unwrap();
        let f = grid.sample(|t| libm::pow(t, 0.2)).unwrap();
        let got = rl_derivative_left(&f, order(0.5)).unwrap();
        let c = libm::tgamma(1.2) / libm::tgamma(0.7);
        let err = max_rel_error(&got, |x| c * libm::pow(x, -0.3), |x| x >= 1.0 / 16.0);
        assert!(err <= 5e-3, "{err}");
    }

    #[test]
    fn rl_derivative_of_constant() {
        let grid = Grid::new(0.0, 1.0, 1000).unwrap();
        let f = grid.sample(|_| 2.0).unwrap();
        let alpha = 0.4;
        let got = rl_derivative_left(&f, order(alpha)).unwrap();
        let exact = |x: f64| 2.0 * libm::pow(x, -alpha) / libm::tgamma(1.0 - alpha);
        assert!(max_rel_error(&got, exact, |x| x > 0.0) < 1e-12);
        let got_r = rl_derivative_right(&f, order(alpha)).unwrap();
        let exact_r = |x: f64| 2.0 * libm::pow(1.0 - x, -alpha) / libm::tgamma(1.0 - alpha);
        assert!(max_rel_error(&got_r, exact_r, |x| x < 1.0) < 1e-12);
    }

    #[test]
    fn rl_and_caputo_agree_when_f_vanishes_at_a() {
        let grid = Grid::new(0.0, 1.0, 500).unwrap();
        let f = grid.sample(|t| t * libm::exp(t)).unwrap();
        let alpha = order(0.65);
        let rl = rl_derivative_left(&f, alpha).unwrap();
        let caputo = caputo_left(&f, None, alpha).unwrap();
        assert_eq!(rl, caputo);
    }

    #[test]
    fn derivative_order_above_one_is_rejected() {
        let grid = Grid::new(0.0, 1.0, 10).unwrap();
        let f = grid.sample(|t| t).unwrap();
        assert!(matches!(
            caputo_left(&f, None, order(1.5)),
            Err(Error::OrderOutOfRange { .. })
        ));
        assert!(rl_derivative_right(&f, order(1.2)).is_err());
    }

    #[test]
    fn norm_bound_examples() {
        assert!((operator_norm_bound(order(1.0), 0.0, PI).unwrap() - PI).abs() < 1e-15);
        let k = operator_norm_bound(order(0.5), 0.0, 1.0).unwrap();
        assert!((k - 1.0 / libm::tgamma(1.5)).abs() < 1e-14);
        // 1/Γ(3/2) = 2/√π
        assert!((k - core::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-12);
        let k = operator_norm_bound(order(0.25), 0.0, 2.0).unwrap();
        assert!((k - libm::pow(2.0, 0.25) / libm::tgamma(1.25)).abs() < 1e-13);
        assert!(operator_norm_bound(order(0.5), 1.0, 1.0).is_err());
    }

    #[test]
    fn mismatched_derivative_grid_is_rejected() {
        let f = Grid::new(0.0, 1.0, 10).unwrap().sample(|t| t).unwrap();
        let df = Grid::new(0.0, 1.0, 12).unwrap().sample(|_| 1.0).unwrap();
        assert_eq!(
            caputo_left(&f, Some(&df), order(0.5)),
            Err(Error::GridMismatch)
        );
    }

    fn sample_vec(len: usize) -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-10.0f64..10.0, len)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn operators_are_linear(u in sample_vec(41), v in sample_vec(41), c in -5.0f64..5.0, alpha in 0.05f64..0.95) {
            let grid = Grid::new(0.0, 1.0, 40).unwrap();
            let fu = SampledFunction::new(grid, u).unwrap();
            let fv = SampledFunction::new(grid, v).unwrap();
            let combo = fu.add(&fv.scaled(c)).unwrap();
            let alpha = order(alpha);
            type Op = fn(&SampledFunction, FractionalOrder) -> Result<SampledFunction>;
            let ops: [Op; 6] = [
                rl_integral_left,
                rl_integral_right,
                |f, a| caputo_left(f, None, a),
                |f, a| caputo_right(f, None, a),
                rl_derivative_left,
                rl_derivative_right,
            ];
            for op in ops {
                let lhs = op(&combo, alpha).unwrap();
                let rhs = op(&fu, alpha).unwrap().add(&op(&fv, alpha).unwrap().scaled(c)).unwrap();
                let scale = 1.0 + lhs.max_abs();
                prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn right_integral_is_reflected_left_integral(u in sample_vec(33), alpha in 0.05f64..2.0) {
            let grid = Grid::new(-1.0, 3.0, 32).unwrap();
            let f = SampledFunction::new(grid, u).unwrap();
            let alpha = order(alpha);
            let right = rl_integral_right(&f, alpha).unwrap();
            let mirrored = rl_integral_left(&f.reflected(), alpha).unwrap().reflected();
            prop_assert!(right.sub(&mirrored).unwrap().max_abs() <= 1e-12 * (1.0 + right.max_abs()));
        }
    }
}

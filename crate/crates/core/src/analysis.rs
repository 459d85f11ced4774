//! Variational functionals, residuals of the eigenequation and eigenvalue
//! comparisons between orders.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fraccalc::identities::{Admissible, Side};
use crate::fraccalc::{
    caputo_left, caputo_right, operator_norm_bound, rl_derivative_right, FractionalOrder,
};
use crate::grid::SampledFunction;
use crate::math;
use crate::problem::ProblemSpec;
use crate::ritz::{
    converge_spectrum, eigenfunction_samples, EigenfunctionView, RitzBasis, SpectrumResult,
};

/// Energy `J`, constraint value `I` and their ratio `R = J / I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalValues {
    pub j: f64,
    pub i: f64,
    pub r: f64,
}

/// `J = ∫ p (cD^α y)² + q y²`, `I = ∫ w y²`, both by the trapezoid rule.
pub fn evaluate_functionals(
    spec: &ProblemSpec,
    y: &SampledFunction,
    y_caputo: &SampledFunction,
) -> Result<FunctionalValues> {
    let grid = y.grid();
    let p = spec.p.sample(grid)?;
    let q = spec.q.sample(grid)?;
    let w = spec.w.sample(grid)?;
    let energy = p.mul(&y_caputo.mul(y_caputo)?)?.add(&q.mul(&y.mul(y)?)?)?;
    let j = energy.trapezoid();
    let i = w.mul(&y.mul(y)?)?.trapezoid();
    if i.is_nan() || i <= 0.0 {
        return Err(Error::DegenerateCandidate(i));
    }
    Ok(FunctionalValues { j, i, r: j / i })
}

/// Outcome of [`rayleigh_minimum_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct RayleighReport {
    pub lambda_first: f64,
    pub first: FunctionalValues,
    /// `|R(y^(n)) - λ^(n)|` for every computed pair.
    pub pair_defects: Vec<f64>,
    /// `min R(y^(1) + h η) - R(y^(1))` over the random trials.
    pub min_perturbation_gain: f64,
    pub trials: usize,
    /// Largest central-difference estimate of `d/dh R(y^(1) + h η)` at `h = 0`.
    pub stationarity: f64,
    /// Index (1-based) of the pair with the smallest quotient.
    pub argmin: usize,
}

impl RayleighReport {
    pub fn quotient_matches(&self, tol_rel: f64) -> bool {
        math::abs(self.first.r - self.lambda_first)
            <= tol_rel * (1.0 + math::abs(self.lambda_first))
    }

    pub fn energy_matches(&self, tol_rel: f64) -> bool {
        math::abs(self.first.j - self.lambda_first)
            <= tol_rel * (1.0 + math::abs(self.lambda_first))
    }

    pub fn is_minimum(&self, slack: f64) -> bool {
        self.min_perturbation_gain >= -slack && self.argmin == 1
    }
}

pub const PERTURBATION_TRIALS: usize = 50;
pub const MAX_PERTURBATION: f64 = 0.1;
const FD_STEPS: [f64; 2] = [1e-3, 1e-4];

/// Re-evaluates the Rayleigh quotient of the computed eigenfunctions from
/// scratch and probes `y^(1)` with random perturbations `h η` in the basis
/// span, `η` of unit constraint norm and `|h| ≤ 0.1`.
///
/// The Caputo derivative of each eigenfunction is recomputed from its samples
/// and, where available, its exact derivative.
pub fn rayleigh_minimum_check(
    spec: &ProblemSpec,
    result: &SpectrumResult,
    basis: &RitzBasis,
    seed: u64,
) -> Result<RayleighReport> {
    let n_eigs = result.eigenvalues.len();
    if n_eigs < 2 {
        return Err(Error::InvalidDimension(alloc::format!(
            "Rayleigh check needs at least 2 eigenpairs, got {n_eigs}"
        )));
    }
    let alpha = spec.alpha();
    let quotient = |coeffs: &[f64]| -> Result<FunctionalValues> {
        let (y, dy) = independent_caputo(basis, coeffs, alpha)?;
        evaluate_functionals(spec, &y, &dy)
    };

    let mut pair_defects = Vec::with_capacity(n_eigs);
    let mut argmin = 0;
    let mut best = f64::INFINITY;
    let mut first = None;
    for (n, (coeffs, lambda)) in result
        .coefficients
        .iter()
        .zip(&result.eigenvalues)
        .enumerate()
    {
        let values = quotient(coeffs)?;
        pair_defects.push(math::abs(values.r - lambda));
        if values.r < best {
            best = values.r;
            argmin = n + 1;
        }
        first.get_or_insert(values);
    }
    let first = first.expect("at least two pairs");

    let y1 = &result.coefficients[0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_gain = f64::INFINITY;
    let mut stationarity = 0.0f64;
    let shifted =
        |eta: &[f64], h: f64| -> Vec<f64> { y1.iter().zip(eta).map(|(y, e)| y + h * e).collect() };
    for _ in 0..PERTURBATION_TRIALS {
        let eta = random_direction(&mut rng, y1.len(), result.constraint_scale);
        let h = rng.gen_range(-MAX_PERTURBATION..=MAX_PERTURBATION);
        min_gain = min_gain.min(quotient(&shifted(&eta, h))?.r - first.r);
        for step in FD_STEPS {
            let up = quotient(&shifted(&eta, step))?.r;
            let down = quotient(&shifted(&eta, -step))?.r;
            stationarity = stationarity.max(math::abs(up - down) / (2.0 * step));
        }
    }

    Ok(RayleighReport {
        lambda_first: result.eigenvalues[0],
        first,
        pair_defects,
        min_perturbation_gain: min_gain,
        trials: PERTURBATION_TRIALS,
        stationarity,
        argmin,
    })
}

/// Uniform random coefficients scaled to `c ‖η‖² = 1`.
fn random_direction(rng: &mut impl Rng, m: usize, c: f64) -> Vec<f64> {
    let eta: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let norm = math::sqrt(c * eta.iter().map(|x| x * x).sum::<f64>());
    eta.iter().map(|x| x / norm).collect()
}

fn independent_caputo(
    basis: &RitzBasis,
    coeffs: &[f64],
    alpha: FractionalOrder,
) -> Result<(SampledFunction, SampledFunction)> {
    let grid = *basis.grid();
    let mut y = SampledFunction::zeros(grid);
    for (c, phi) in coeffs.iter().zip(basis.samples()) {
        y.axpy(*c, phi)?;
    }
    let dy = match basis.derivatives() {
        Some(ds) => {
            let mut slope = SampledFunction::zeros(grid);
            for (c, d) in coeffs.iter().zip(ds) {
                slope.axpy(*c, d)?;
            }
            caputo_left(&y, Some(&slope), alpha)?
        }
        None => caputo_left(&y, None, alpha)?,
    };
    Ok((y, dy))
}

/// Pointwise residual of the eigenequation for one approximate eigenpair.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// `r = Dᵣ[p cD^α y] + q y - λ w y`, with `Dᵣ` the chosen right derivative.
    pub residual: SampledFunction,
    /// L² norm over interior nodes: the endpoints and the two nodes next to
    /// each are excluded.
    pub l2_norm: f64,
    /// `p cD^α y` at `b`.
    pub boundary_flux: f64,
}

/// Residual with the right Caputo derivative of the flux.
pub fn fsle_residual(
    spec: &ProblemSpec,
    view: &EigenfunctionView,
    lambda: f64,
) -> Result<ResidualReport> {
    residual_with(spec, view, lambda, |flux, alpha| {
        caputo_right(flux, None, alpha)
    })
}

/// Residuals in the Caputo and Riemann–Liouville forms and their difference.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerLagrangeReport {
    pub caputo: ResidualReport,
    pub riemann_liouville: ResidualReport,
    /// Interior L² norm of the difference; it is the endpoint term carried by
    /// the flux at `b`.
    pub difference_norm: f64,
    /// `‖2 w y‖`, the derivative of the constraint integrand. Reported only.
    pub constraint_gradient_norm: f64,
}

pub fn euler_lagrange_residual(
    spec: &ProblemSpec,
    view: &EigenfunctionView,
    lambda: f64,
) -> Result<EulerLagrangeReport> {
    let caputo = fsle_residual(spec, view, lambda)?;
    let riemann_liouville = residual_with(spec, view, lambda, rl_derivative_right)?;
    let difference = riemann_liouville.residual.sub(&caputo.residual)?;
    let w = spec.w.sample(view.y.grid())?;
    let gradient = w.mul(&view.y)?.scaled(2.0);
    Ok(EulerLagrangeReport {
        difference_norm: interior_l2(&difference),
        constraint_gradient_norm: gradient.l2_norm(),
        caputo,
        riemann_liouville,
    })
}

fn residual_with(
    spec: &ProblemSpec,
    view: &EigenfunctionView,
    lambda: f64,
    right: impl Fn(&SampledFunction, FractionalOrder) -> Result<SampledFunction>,
) -> Result<ResidualReport> {
    let grid = view.y.grid();
    let p = spec.p.sample(grid)?;
    let q = spec.q.sample(grid)?;
    let w = spec.w.sample(grid)?;
    let flux = p.mul(&view.caputo)?;
    let mut residual = right(&flux, spec.alpha())?;
    residual.axpy(1.0, &q.mul(&view.y)?)?;
    residual.axpy(-lambda, &w.mul(&view.y)?)?;
    Ok(ResidualReport {
        l2_norm: interior_l2(&residual),
        boundary_flux: flux.last(),
        residual,
    })
}

fn interior_l2(f: &SampledFunction) -> f64 {
    let grid = f.grid();
    let keep = Admissible::edges_only();
    let squares: Vec<f64> = f
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| keep.contains(grid, *i, Side::Left))
        .map(|(_, v)| v * v)
        .collect();
    math::sqrt(crate::grid::trapezoid(grid.h(), &squares))
}

/// Discretization used by [`oscillator_bound_suite`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteSettings {
    pub grid_n: usize,
    pub m_max: usize,
}

impl Default for SuiteSettings {
    fn default() -> Self {
        Self {
            grid_n: 2048,
            m_max: 24,
        }
    }
}

/// One comparison `λ^(j)(α₁)` against `λ^(j)(α₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub alpha1: f64,
    pub alpha2: f64,
    pub j: usize,
    /// `K_{α₂ - α₁}` on the interval.
    pub k: f64,
    /// `λ^(j)(α₁)`.
    pub lhs: f64,
    /// `λ^(j)(α₂)`, multiplied by `K²` when `K > 1`.
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Classical eigenvalue `p0 (j π / (b - a))²` of the order-one problem.
pub fn classical_eigenvalue(p0: f64, a: f64, b: f64, j: usize) -> f64 {
    let k = j as f64 * PI / (b - a);
    p0 * k * k
}

/// Compares eigenvalues of the oscillator `p ≡ p0, q ≡ 0, w ≡ 1` between
/// orders. Order one uses the closed-form classical values.
pub fn oscillator_bound_suite(
    p0: f64,
    interval: (f64, f64),
    pairs: &[(f64, f64)],
    j_max: usize,
    settings: SuiteSettings,
) -> Result<Vec<BoundRow>> {
    let (a, b) = interval;
    if !(p0 > 0.0 && p0.is_finite()) {
        return Err(Error::Inadmissible(alloc::format!(
            "p0 must be positive, got {p0}"
        )));
    }
    for &(lo, hi) in pairs {
        if !(lo > 0.5 && lo < hi && hi <= 1.0) {
            return Err(Error::Inadmissible(alloc::format!(
                "order pair ({lo}, {hi}) must satisfy 1/2 < a1 < a2 <= 1"
            )));
        }
    }

    let mut cache: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut spectrum = |alpha: f64| -> Result<Vec<f64>> {
        if alpha == 1.0 {
            return Ok((1..=j_max)
                .map(|j| classical_eigenvalue(p0, a, b, j))
                .collect());
        }
        if let Some((_, v)) = cache.iter().find(|(o, _)| *o == alpha) {
            return Ok(v.clone());
        }
        let spec = ProblemSpec::oscillator(p0, a, b, alpha)?;
        let grid = spec.grid(settings.grid_n)?;
        let m_min = j_max.max(settings.m_max);
        let r = converge_spectrum(&spec, &grid, j_max, m_min, settings.m_max.max(m_min))?;
        cache.push((alpha, r.eigenvalues.clone()));
        Ok(r.eigenvalues)
    };

    let mut rows = Vec::new();
    for &(alpha1, alpha2) in pairs {
        let low = spectrum(alpha1)?;
        let high = spectrum(alpha2)?;
        let k = operator_norm_bound(FractionalOrder::new(alpha2 - alpha1)?, a, b)?;
        let factor = if k <= 1.0 { 1.0 } else { k * k };
        for j in 1..=j_max {
            let lhs = low[j - 1];
            let rhs = factor * high[j - 1];
            let margin = rhs - lhs;
            rows.push(BoundRow {
                alpha1,
                alpha2,
                j,
                k,
                lhs,
                rhs,
                margin,
                pass: margin >= 0.0,
            });
        }
    }
    Ok(rows)
}

/// Views of every computed eigenfunction, in order.
pub fn eigenfunctions(
    result: &SpectrumResult,
    basis: &RitzBasis,
) -> Result<Vec<EigenfunctionView>> {
    (1..=result.eigenvalues.len())
        .map(|n| eigenfunction_samples(result, basis, n))
        .collect()
}

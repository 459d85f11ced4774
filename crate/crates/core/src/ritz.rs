//! Ritz approximation of the eigenpairs with a weighted sine basis.
//!
//! The basis is `φ_k(x) = sin(k s(x)) / √w(x)`, where `s` maps `[a, b]` affinely
//! onto `[0, π]`. Minimizing the energy on the sphere `c ‖β‖² = 1` with
//! `c = (b - a) / 2` is the symmetric eigenproblem `A β = λ c β`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::eigen::{jacobi, SymmetricMatrix};
use crate::error::{Error, Result};
use crate::fraccalc::{caputo_left, FractionalOrder};
use crate::grid::{Grid, SampledFunction};
use crate::math;
use crate::problem::{validate, ProblemSpec};

/// Basis samples and their left Caputo derivatives on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RitzBasis {
    grid: Grid,
    alpha: FractionalOrder,
    samples: Vec<SampledFunction>,
    derivatives: Option<Vec<SampledFunction>>,
    caputo: Vec<SampledFunction>,
}

impl RitzBasis {
    pub fn m(&self) -> usize {
        self.samples.len()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn alpha(&self) -> FractionalOrder {
        self.alpha
    }

    /// `φ_k` for `k = 1..=m`, stored at index `k - 1`.
    pub fn samples(&self) -> &[SampledFunction] {
        &self.samples
    }

    pub fn caputo(&self) -> &[SampledFunction] {
        &self.caputo
    }

    /// Exact first derivatives `φ_k'`, present when `w` has an exact derivative.
    pub fn derivatives(&self) -> Option<&[SampledFunction]> {
        self.derivatives.as_deref()
    }

    /// `Σ c_k φ_k` and `Σ c_k cD^α φ_k`; `coeffs` may be shorter than `m`.
    pub fn combine(&self, coeffs: &[f64]) -> Result<(SampledFunction, SampledFunction)> {
        if coeffs.len() > self.m() {
            return Err(Error::InvalidDimension(alloc::format!(
                "{} coefficients for a basis of size {}",
                coeffs.len(),
                self.m()
            )));
        }
        let mut y = SampledFunction::zeros(self.grid);
        let mut dy = SampledFunction::zeros(self.grid);
        for (k, &c) in coeffs.iter().enumerate() {
            y.axpy(c, &self.samples[k])?;
            dy.axpy(c, &self.caputo[k])?;
        }
        Ok((y, dy))
    }
}

/// Samples the first `m` basis functions and their Caputo derivatives.
///
/// When `w` carries an exact derivative, `φ_k'` is supplied analytically;
/// otherwise the derivative is formed from samples.
pub fn build_basis(spec: &ProblemSpec, grid: &Grid, m: usize) -> Result<RitzBasis> {
    validate(spec, grid).into_result()?;
    if m == 0 {
        return Err(Error::InvalidDimension("basis of size 0".into()));
    }
    let alpha = spec.alpha();
    let w = spec.w.sample(grid)?;
    let dw = spec.w.sample_derivative(grid).transpose()?;
    let stretch = PI / grid.width();
    let n = grid.cells();

    let mut samples = Vec::with_capacity(m);
    let mut derivatives = Vec::with_capacity(m);
    let mut caputo = Vec::with_capacity(m);
    for k in 1..=m {
        let freq = k as f64 * stretch;
        let mut values = Vec::with_capacity(grid.len());
        let mut slopes = Vec::with_capacity(grid.len());
        for (i, x) in grid.nodes().enumerate() {
            let phase = freq * (x - grid.a());
            let root = math::sqrt(w.values()[i]);
            let sin = if i == 0 || i == n {
                0.0
            } else {
                math::sin(phase)
            };
            values.push(sin / root);
            if let Some(dw) = &dw {
                let cos = math::cos(phase);
                slopes
                    .push(freq * cos / root - 0.5 * sin * dw.values()[i] / (root * w.values()[i]));
            }
        }
        let phi = SampledFunction::new(*grid, values)?;
        let slope = match dw {
            Some(_) => Some(SampledFunction::new(*grid, slopes)?),
            None => None,
        };
        caputo.push(caputo_left(&phi, slope.as_ref(), alpha)?);
        samples.push(phi);
        derivatives.extend(slope);
    }
    Ok(RitzBasis {
        grid: *grid,
        alpha,
        samples,
        derivatives: dw.map(|_| derivatives),
        caputo,
    })
}

/// The quadratic energy form in basis coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct RitzSystem {
    pub matrix: SymmetricMatrix,
    /// `c` in the constraint `c ‖β‖² = 1`; equals `π/2` on `[0, π]`.
    pub constraint_scale: f64,
    pub alpha: FractionalOrder,
}

impl RitzSystem {
    pub fn m(&self) -> usize {
        self.matrix.dim()
    }

    /// Same form restricted to the first `k` basis functions.
    pub fn leading(&self, k: usize) -> Result<Self> {
        Ok(Self {
            matrix: self.matrix.leading(k)?,
            ..self.clone()
        })
    }
}

/// `A_kj = ∫ p cD^α φ_k cD^α φ_j + q φ_k φ_j dx`, composite trapezoid.
pub fn assemble(spec: &ProblemSpec, basis: &RitzBasis) -> Result<RitzSystem> {
    let grid = basis.grid();
    let p = spec.p.sample(grid)?;
    let q = spec.q.sample(grid)?;
    let m = basis.m();
    let h = grid.h();
    let n = grid.cells();
    let mut matrix = SymmetricMatrix::zeros(m);
    for k in 0..m {
        let (ck, fk) = (basis.caputo[k].values(), basis.samples[k].values());
        for j in k..m {
            let (cj, fj) = (basis.caputo[j].values(), basis.samples[j].values());
            let mut sum = 0.0;
            for i in 0..=n {
                let term = p.values()[i] * ck[i] * cj[i] + q.values()[i] * fk[i] * fj[i];
                sum += if i == 0 || i == n { 0.5 * term } else { term };
            }
            let entry = h * sum;
            if !entry.is_finite() {
                return Err(Error::NonFiniteForm(k, j));
            }
            matrix.set(k, j, entry);
        }
    }
    Ok(RitzSystem {
        matrix,
        constraint_scale: 0.5 * grid.width(),
        alpha: spec.alpha(),
    })
}

/// Eigenvalues, normalized coefficient vectors and convergence traces.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub alpha: f64,
    pub m: usize,
    pub constraint_scale: f64,
    /// Increasing.
    pub eigenvalues: Vec<f64>,
    /// `coefficients[n]` pairs with `eigenvalues[n]`; `c ‖β‖² = 1`.
    pub coefficients: Vec<Vec<f64>>,
    /// Basis sizes at which traces were recorded.
    pub m_values: Vec<usize>,
    /// `traces[n][t]` is eigenvalue `n` computed with `m_values[t]` functions.
    pub traces: Vec<Vec<f64>>,
    /// `|λ(m_max) - λ(m_max - 1)| / |λ(m_max)|` per eigenvalue, when both exist.
    pub stagnation: Vec<Option<f64>>,
}

/// Leading `n_eigs` eigenpairs of a single system.
pub fn solve_spectrum(system: &RitzSystem, n_eigs: usize) -> Result<SpectrumResult> {
    let m = system.m();
    if n_eigs == 0 || n_eigs > m {
        return Err(Error::InvalidDimension(alloc::format!(
            "{n_eigs} eigenpairs requested from a basis of size {m}"
        )));
    }
    let eig = jacobi(&system.matrix)?;
    let c = system.constraint_scale;
    let eigenvalues: Vec<f64> = eig.values[..n_eigs].iter().map(|v| v / c).collect();
    let coefficients = eig.vectors[..n_eigs]
        .iter()
        .map(|v| normalize(v, c))
        .collect();
    Ok(SpectrumResult {
        alpha: system.alpha.value(),
        m,
        constraint_scale: c,
        traces: eigenvalues.iter().map(|&v| alloc::vec![v]).collect(),
        eigenvalues,
        coefficients,
        m_values: alloc::vec![m],
        stagnation: alloc::vec![None; n_eigs],
    })
}

/// Scales a unit vector onto `c ‖β‖² = 1`; the first coefficient that is not
/// negligible is made positive.
fn normalize(v: &[f64], c: f64) -> Vec<f64> {
    let largest = v.iter().fold(0.0f64, |m, x| m.max(math::abs(*x)));
    let sign = v
        .iter()
        .find(|x| math::abs(**x) > 1e-8 * largest)
        .map_or(1.0, |x| x.signum());
    let norm = math::sqrt(v.iter().map(|x| x * x).sum::<f64>());
    let scale = sign / (norm * math::sqrt(c));
    v.iter().map(|x| scale * x).collect()
}

/// Largest basis size allowed on `grid`: eight cells per basis oscillation.
pub fn max_basis_size(grid: &Grid) -> usize {
    grid.cells() / 8
}

/// Solves for every `m` in `m_min..=m_max` and returns the result at `m_max`
/// together with the basis it was computed in.
///
/// The form for `m` functions is the leading block of the form for `m_max`,
/// so it is assembled once.
pub fn converge(
    spec: &ProblemSpec,
    grid: &Grid,
    n_eigs: usize,
    m_min: usize,
    m_max: usize,
) -> Result<(SpectrumResult, RitzBasis)> {
    if m_min == 0 || m_min > m_max || m_max > max_basis_size(grid) {
        return Err(Error::InvalidDimension(alloc::format!(
            "basis sizes {m_min}..={m_max} on {} cells (need 1 <= m_min <= m_max <= n/8)",
            grid.cells()
        )));
    }
    if n_eigs == 0 || n_eigs > m_min {
        return Err(Error::InvalidDimension(alloc::format!(
            "{n_eigs} eigenpairs requested with m_min = {m_min}"
        )));
    }
    let basis = build_basis(spec, grid, m_max)?;
    let full = assemble(spec, &basis)?;
    let mut traces = alloc::vec![Vec::new(); n_eigs];
    let mut last = None;
    for m in m_min..=m_max {
        let r = solve_spectrum(&full.leading(m)?, n_eigs)?;
        for (trace, v) in traces.iter_mut().zip(&r.eigenvalues) {
            trace.push(*v);
        }
        last = Some(r);
    }
    let mut result = last.expect("m_min <= m_max");
    result.stagnation = traces
        .iter()
        .map(|t| match t.as_slice() {
            [.., prev, cur] => Some(math::abs(cur - prev) / math::abs(*cur)),
            _ => None,
        })
        .collect();
    result.traces = traces;
    result.m_values = (m_min..=m_max).collect();
    Ok((result, basis))
}

pub fn converge_spectrum(
    spec: &ProblemSpec,
    grid: &Grid,
    n_eigs: usize,
    m_min: usize,
    m_max: usize,
) -> Result<SpectrumResult> {
    converge(spec, grid, n_eigs, m_min, m_max).map(|(r, _)| r)
}

/// Samples of one approximate eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenfunctionView {
    /// 1-based.
    pub index: usize,
    pub eigenvalue: f64,
    pub y: SampledFunction,
    pub caputo: SampledFunction,
    pub boundary: (f64, f64),
}

/// `y^(n) = Σ β_k^(n) φ_k` and its Caputo derivative, `n` 1-based.
pub fn eigenfunction_samples(
    result: &SpectrumResult,
    basis: &RitzBasis,
    n: usize,
) -> Result<EigenfunctionView> {
    if n == 0 || n > result.eigenvalues.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            available: result.eigenvalues.len(),
        });
    }
    let (y, caputo) = basis.combine(&result.coefficients[n - 1])?;
    Ok(EigenfunctionView {
        index: n,
        eigenvalue: result.eigenvalues[n - 1],
        boundary: (y.first(), y.last()),
        y,
        caputo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{functional_lower_bound, CoefficientField};
    use alloc::vec;
    use proptest::prelude::*;

    fn oscillator(alpha: f64) -> ProblemSpec {
        ProblemSpec::oscillator(1.0, 0.0, PI, alpha).unwrap()
    }

    fn grid(n: usize) -> Grid {
        Grid::new(0.0, PI, n).unwrap()
    }

    #[test]
    fn basis_vanishes_at_endpoints() {
        let g = grid(64);
        let basis = build_basis(&oscillator(0.8), &g, 4).unwrap();
        for (k, phi) in basis.samples().iter().enumerate() {
            assert_eq!(phi.first(), 0.0);
            assert_eq!(phi.last(), 0.0);
            if k == 0 {
                for (x, v) in g.nodes().zip(phi.values()).skip(1).take(62) {
                    assert!((v - libm::sin(x)).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn constant_weight_scales_basis() {
        let mut spec = oscillator(0.8);
        spec.w = CoefficientField::Constant(4.0);
        let g = grid(64);
        let basis = build_basis(&spec, &g, 3).unwrap();
        for (x, v) in g.nodes().zip(basis.samples()[2].values()).skip(1).take(62) {
            assert!((v - 0.5 * libm::sin(3.0 * x)).abs() < 1e-15);
        }
    }

    #[test]
    fn classical_caputo_rows_are_derivatives() {
        let g = grid(128);
        let basis = build_basis(&oscillator(1.0), &g, 3).unwrap();
        for k in 1..=3 {
            let kf = k as f64;
            for (x, v) in g.nodes().zip(basis.caputo()[k - 1].values()) {
                assert!((v - kf * libm::cos(kf * x)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn classical_form_is_diagonal() {
        let g = grid(256);
        let spec = oscillator(1.0);
        let system = assemble(&spec, &build_basis(&spec, &g, 3).unwrap()).unwrap();
        for k in 0..3 {
            for j in 0..3 {
                let kf = (k + 1) as f64;
                let exact = if k == j { 0.5 * PI * kf * kf } else { 0.0 };
                assert!((system.matrix.get(k, j) - exact).abs() < 1e-8);
            }
        }
        assert_eq!(system.constraint_scale, 0.5 * PI);
    }

    #[test]
    fn potential_term_is_a_multiple_of_identity() {
        let mut spec = oscillator(0.8);
        spec.p = CoefficientField::Constant(1e-12);
        spec.q = CoefficientField::Constant(1.0);
        let g = grid(256);
        let system = assemble(&spec, &build_basis(&spec, &g, 4).unwrap()).unwrap();
        for k in 0..4 {
            for j in 0..4 {
                let exact = if k == j { 0.5 * PI } else { 0.0 };
                assert!((system.matrix.get(k, j) - exact).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn diagonal_system_spectrum() {
        let system = RitzSystem {
            matrix: SymmetricMatrix::from_fn(3, |i, j| {
                if i == j {
                    [0.5 * PI, 2.0 * PI, 4.5 * PI][i]
                } else {
                    0.0
                }
            }),
            constraint_scale: 0.5 * PI,
            alpha: FractionalOrder::new(1.0).unwrap(),
        };
        let r = solve_spectrum(&system, 3).unwrap();
        let s = 1.0 / (0.5 * PI).sqrt();
        for (n, exact) in [1.0, 4.0, 9.0].iter().enumerate() {
            assert!((r.eigenvalues[n] - exact).abs() < 1e-14);
            for (k, c) in r.coefficients[n].iter().enumerate() {
                let e = if k == n { s } else { 0.0 };
                assert!((c - e).abs() < 1e-14);
            }
        }
        assert!(solve_spectrum(&system, 4).is_err());
    }

    #[test]
    fn classical_traces_are_exact() {
        let g = grid(256);
        let r = converge_spectrum(&oscillator(1.0), &g, 3, 3, 12).unwrap();
        for (n, trace) in r.traces.iter().enumerate() {
            let exact = ((n + 1) * (n + 1)) as f64;
            assert_eq!(trace.len(), 10);
            assert!(trace.iter().all(|v| (v - exact).abs() < 1e-10 * exact));
        }
        assert!(r.stagnation.iter().all(|s| s.unwrap() < 1e-12));
    }

    #[test]
    fn classical_eigenfunction_is_normalized_sine() {
        let g = grid(512);
        let spec = oscillator(1.0);
        let (r, basis) = converge(&spec, &g, 2, 4, 8).unwrap();
        let v1 = eigenfunction_samples(&r, &basis, 1).unwrap();
        let v2 = eigenfunction_samples(&r, &basis, 2).unwrap();
        assert_eq!(v1.boundary, (0.0, 0.0));
        let amp = (2.0 / PI).sqrt();
        for (x, y) in g.nodes().zip(v1.y.values()) {
            assert!((y - amp * libm::sin(x)).abs() < 1e-12);
        }
        assert!(v1.y.mul(&v2.y).unwrap().trapezoid().abs() < 1e-6);
        assert!((v1.y.mul(&v1.y).unwrap().trapezoid() - 1.0).abs() < 1e-10);
        assert!(matches!(
            eigenfunction_samples(&r, &basis, 3),
            Err(Error::IndexOutOfRange {
                index: 3,
                available: 2
            })
        ));
    }

    #[test]
    fn fractional_traces_decrease_and_spectrum_is_ordered() {
        let g = grid(1024);
        let spec = oscillator(0.75);
        let r = converge_spectrum(&spec, &g, 3, 3, 16).unwrap();
        for trace in &r.traces {
            assert!(trace.windows(2).all(|w| w[1] <= w[0] + 1e-10));
        }
        assert!(r.eigenvalues.windows(2).all(|w| w[1] - w[0] > 1e-8));
        let bound = functional_lower_bound(&spec, &g).unwrap();
        assert!(r.eigenvalues[0] >= bound.value - bound.tolerance());
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = r.coefficients[i]
                    .iter()
                    .zip(&r.coefficients[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((r.constraint_scale * dot - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn general_interval_classical_limit() {
        let spec = ProblemSpec::oscillator(2.0, 1.0, 3.0, 1.0).unwrap();
        let g = spec.grid(512).unwrap();
        let r = converge_spectrum(&spec, &g, 3, 3, 8).unwrap();
        for (j, v) in r.eigenvalues.iter().enumerate() {
            let exact = 2.0 * ((j + 1) as f64 * PI / 2.0).powi(2);
            assert!((v - exact).abs() < 1e-6 * exact);
        }
    }

    #[test]
    fn oversized_basis_is_rejected() {
        let g = grid(64);
        assert!(converge_spectrum(&oscillator(0.8), &g, 2, 2, 9).is_err());
        assert!(converge_spectrum(&oscillator(0.8), &g, 3, 2, 8).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn spectrum_is_invariant_under_coefficient_scaling(c in 0.1f64..10.0) {
            let mut spec = oscillator(0.7);
            spec.w = CoefficientField::Polynomial(vec![1.0, 0.2]);
            spec.q = CoefficientField::Polynomial(vec![0.5, 0.0, -0.1]);
            let g = grid(256);
            let base = converge_spectrum(&spec, &g, 3, 8, 8).unwrap();
            let scaled = converge_spectrum(&spec.scaled(c), &g, 3, 8, 8).unwrap();
            for (u, v) in base.eigenvalues.iter().zip(&scaled.eigenvalues) {
                prop_assert!((u - v).abs() <= 1e-10 * u.abs());
            }
        }
    }
}

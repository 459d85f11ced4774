//! Problem instances: interval, order and the coefficient fields `p`, `q`, `w`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::fraccalc::FractionalOrder;
use crate::grid::{Grid, SampledFunction};
use crate::math;

/// A coefficient function drawn from a small registry.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientField {
    Constant(f64),
    /// Coefficients in ascending powers of `x`.
    Polynomial(Vec<f64>),
    /// Node values, linearly interpolated; an optional table of the derivative.
    Table {
        samples: SampledFunction,
        derivative: Option<SampledFunction>,
    },
}

impl CoefficientField {
    pub fn table(samples: SampledFunction) -> Self {
        Self::Table {
            samples,
            derivative: None,
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Self::Constant(c) => Ok(*c),
            Self::Polynomial(c) => Ok(horner(c, x)),
            Self::Table { samples, .. } => interpolate(samples, x),
        }
    }

    /// Exact derivative where the representation carries one.
    pub fn derivative(&self) -> Option<CoefficientField> {
        match self {
            Self::Constant(_) => Some(Self::Constant(0.0)),
            Self::Polynomial(c) => Some(Self::Polynomial(
                c.iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, v)| k as f64 * v)
                    .collect(),
            )),
            Self::Table { derivative, .. } => derivative.clone().map(Self::table),
        }
    }

    pub fn has_derivative(&self) -> bool {
        !matches!(
            self,
            Self::Table {
                derivative: None,
                ..
            }
        )
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Self::Constant(_) => true,
            Self::Polynomial(c) => c.iter().skip(1).all(|v| *v == 0.0),
            Self::Table { .. } => false,
        }
    }

    pub fn sample(&self, grid: &Grid) -> Result<SampledFunction> {
        let values = grid
            .nodes()
            .map(|x| self.eval(x))
            .collect::<Result<Vec<_>>>()?;
        SampledFunction::new(*grid, values)
    }

    pub fn sample_derivative(&self, grid: &Grid) -> Option<Result<SampledFunction>> {
        self.derivative().map(|d| d.sample(grid))
    }

    /// Interval on which the field is defined, if restricted.
    pub fn domain(&self) -> Option<(f64, f64)> {
        match self {
            Self::Table { samples, .. } => Some((samples.grid().a(), samples.grid().b())),
            _ => None,
        }
    }

    /// Multiplies the field (and its derivative) by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        match self {
            Self::Constant(v) => Self::Constant(c * v),
            Self::Polynomial(v) => Self::Polynomial(v.iter().map(|x| c * x).collect()),
            Self::Table {
                samples,
                derivative,
            } => Self::Table {
                samples: samples.scaled(c),
                derivative: derivative.as_ref().map(|d| d.scaled(c)),
            },
        }
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn interpolate(table: &SampledFunction, x: f64) -> Result<f64> {
    let grid = table.grid();
    let slack = 1e-12 * grid.width();
    if !(x >= grid.a() - slack && x <= grid.b() + slack) {
        return Err(Error::OutsideTable(x));
    }
    let t = ((x - grid.a()) / grid.h()).clamp(0.0, grid.cells() as f64);
    let i = (t as usize).min(grid.cells() - 1);
    let theta = t - i as f64;
    let v = table.values();
    Ok(v[i] + theta * (v[i + 1] - v[i]))
}

/// A fractional Sturm–Liouville problem with Dirichlet conditions on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    a: f64,
    b: f64,
    alpha: FractionalOrder,
    pub p: CoefficientField,
    pub q: CoefficientField,
    pub w: CoefficientField,
}

impl ProblemSpec {
    /// Orders in `(0, 1]` are accepted; [`validate`] flags those outside `(1/2, 1)`.
    pub fn new(
        a: f64,
        b: f64,
        alpha: f64,
        p: CoefficientField,
        q: CoefficientField,
        w: CoefficientField,
    ) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInterval { a, b });
        }
        let alpha = FractionalOrder::new(alpha)?;
        if alpha.value() > 1.0 {
            return Err(Error::OrderOutOfRange {
                op: "problem",
                range: "(0, 1]",
                order: alpha.value(),
            });
        }
        Ok(Self {
            a,
            b,
            alpha,
            p,
            q,
            w,
        })
    }

    /// `p ≡ p0`, `q ≡ 0`, `w ≡ 1`.
    pub fn oscillator(p0: f64, a: f64, b: f64, alpha: f64) -> Result<Self> {
        Self::new(
            a,
            b,
            alpha,
            CoefficientField::Constant(p0),
            CoefficientField::Constant(0.0),
            CoefficientField::Constant(1.0),
        )
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn alpha(&self) -> FractionalOrder {
        self.alpha
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(
            self.a,
            self.b,
            alpha,
            self.p.clone(),
            self.q.clone(),
            self.w.clone(),
        )
    }

    /// `(c p, c q, c w)`; the spectrum is unchanged.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            p: self.p.scaled(c),
            q: self.q.scaled(c),
            w: self.w.scaled(c),
            ..self.clone()
        }
    }

    /// Grid with `n` cells over the problem interval.
    pub fn grid(&self, n: usize) -> Result<Grid> {
        Grid::new(self.a, self.b, n)
    }
}

/// One violated admissibility condition.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    GridMismatch {
        grid: (f64, f64),
        interval: (f64, f64),
    },
    OrderOutOfRange(f64),
    NotPositive {
        field: char,
        x: f64,
        value: f64,
    },
    MissingDerivative {
        field: char,
    },
    TableCoverage {
        field: char,
    },
    Evaluation {
        field: char,
        message: String,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::GridMismatch { grid, interval } => write!(
                f,
                "grid [{}, {}] does not cover interval [{}, {}]",
                grid.0, grid.1, interval.0, interval.1
            ),
            Self::OrderOutOfRange(a) => write!(f, "order outside (1/2,1): {a}"),
            Self::NotPositive { field, x, value } => {
                write!(f, "{field} not strictly positive: {field}({x}) = {value}")
            }
            Self::MissingDerivative { field } => {
                write!(
                    f,
                    "{field} has no derivative (table without a derivative table)"
                )
            }
            Self::TableCoverage { field } => write!(f, "{field} table does not cover the interval"),
            Self::Evaluation { field, message } => {
                write!(f, "{field} cannot be evaluated: {message}")
            }
        }
    }
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Validation {
    pub diagnostics: Vec<Diagnostic>,
    /// Largest `|g(x) - g(y)| / |x - y|^{α - 1/2}` for `g = (√w)'` over
    /// sampled node pairs. Advisory only; `None` when it cannot be formed.
    pub holder_quotient: Option<f64>,
}

impl Validation {
    pub fn is_admissible(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        match self.diagnostics.first() {
            None => Ok(()),
            Some(d) => Err(Error::Inadmissible(alloc::format!("{d}"))),
        }
    }
}

/// Checks the admissibility hypotheses on the nodes of `grid`.
pub fn validate(spec: &ProblemSpec, grid: &Grid) -> Validation {
    let mut diagnostics = Vec::new();
    let slack = 1e-12 * (spec.b - spec.a);
    if math::abs(grid.a() - spec.a) > slack || math::abs(grid.b() - spec.b) > slack {
        diagnostics.push(Diagnostic::GridMismatch {
            grid: (grid.a(), grid.b()),
            interval: (spec.a, spec.b),
        });
    }
    let alpha = spec.alpha.value();
    if !(alpha > 0.5 && alpha < 1.0) && !spec.alpha.is_classical() {
        diagnostics.push(Diagnostic::OrderOutOfRange(alpha));
    }

    for (name, field) in [('p', &spec.p), ('q', &spec.q), ('w', &spec.w)] {
        if let Some((lo, hi)) = field.domain() {
            if lo > spec.a + slack || hi < spec.b - slack {
                diagnostics.push(Diagnostic::TableCoverage { field: name });
                continue;
            }
        }
        let samples = match field.sample(grid) {
            Ok(s) => s,
            Err(e) => {
                diagnostics.push(Diagnostic::Evaluation {
                    field: name,
                    message: alloc::format!("{e}"),
                });
                continue;
            }
        };
        if name != 'q' {
            let bad = grid
                .nodes()
                .zip(samples.values())
                .find(|(_, v)| v.is_nan() || **v <= 0.0);
            if let Some((x, &value)) = bad {
                diagnostics.push(Diagnostic::NotPositive {
                    field: name,
                    x,
                    value,
                });
            }
        }
    }
    if !spec.p.has_derivative() {
        diagnostics.push(Diagnostic::MissingDerivative { field: 'p' });
    }

    let holder_quotient = if diagnostics.is_empty() {
        holder_quotient(spec, grid)
    } else {
        None
    };
    Validation {
        diagnostics,
        holder_quotient,
    }
}

const HOLDER_SAMPLES: usize = 256;

fn holder_quotient(spec: &ProblemSpec, grid: &Grid) -> Option<f64> {
    let exponent = spec.alpha.value() - 0.5;
    if exponent <= 0.0 {
        return None;
    }
    let w = spec.w.sample(grid).ok()?;
    let dw = match spec.w.sample_derivative(grid) {
        Some(d) => d.ok()?,
        None => crate::fraccalc::central_difference(&w).ok()?,
    };
    let g: Vec<f64> = w
        .values()
        .iter()
        .zip(dw.values())
        .map(|(w, d)| 0.5 * d / math::sqrt(*w))
        .collect();
    let stride = grid.len().div_ceil(HOLDER_SAMPLES).max(1);
    let picks: Vec<usize> = (0..grid.len()).step_by(stride).collect();
    let mut worst = 0.0f64;
    for (k, &i) in picks.iter().enumerate() {
        for &j in &picks[k + 1..] {
            let dx = grid.node(j) - grid.node(i);
            worst = worst.max(math::abs(g[j] - g[i]) / math::powf(dx, exponent));
        }
    }
    Some(worst)
}

/// `min_i q(x_i) / w(x_i)`: no eigenvalue lies below it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub value: f64,
}

impl LowerBound {
    /// Slack used when comparing eigenvalues against the bound.
    pub fn tolerance(&self) -> f64 {
        1e-8 * (1.0 + math::abs(self.value))
    }
}

pub fn functional_lower_bound(spec: &ProblemSpec, grid: &Grid) -> Result<LowerBound> {
    let q = spec.q.sample(grid)?;
    let w = spec.w.sample(grid)?;
    let mut value = f64::INFINITY;
    for (i, (q, w)) in q.values().iter().zip(w.values()).enumerate() {
        if w.is_nan() || *w <= 0.0 {
            return Err(Error::Inadmissible(alloc::format!(
                "w not strictly positive at node {i}"
            )));
        }
        value = value.min(q / w);
    }
    Ok(LowerBound { value })
}

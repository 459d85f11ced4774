//! Uniform grids and functions sampled on them.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Uniform partition of `[a, b]` into `n` cells, nodes `x_i = a + i h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidInterval { a, b });
        }
        if n < 2 {
            return Err(Error::GridTooSmall(n));
        }
        Ok(Self { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of cells.
    pub fn cells(&self) -> usize {
        self.n
    }

    /// Number of nodes, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// Node `i`; the last node is `b` exactly.
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i <= self.n);
        if i == self.n {
            self.b
        } else {
            self.a + i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |i| self.node(i))
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Result<SampledFunction> {
        SampledFunction::new(*self, self.nodes().map(f).collect())
    }

    /// Same interval, twice as many cells.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n,
            ..*self
        }
    }
}

/// Values of a function at every node of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: alloc::vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Mirror image about the midpoint: `g(x) = f(a + b - x)`.
    pub fn reflected(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            grid: self.grid,
            values,
        }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &Self, f: F) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&u, &v)| f(u, v))
            .collect();
        Self::new(self.grid, values)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |u, v| u - v)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |u, v| u + v)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |u, v| u * v)
    }

    /// `self + c * other`, in place.
    pub fn axpy(&mut self, c: f64, other: &Self) -> Result<()> {
        self.check_same_grid(other)?;
        for (u, v) in self.values.iter_mut().zip(&other.values) {
            *u += c * v;
        }
        Ok(())
    }

    /// Composite trapezoid rule over the whole grid.
    pub fn trapezoid(&self) -> f64 {
        trapezoid(self.grid.h(), &self.values)
    }

    /// Discrete L² norm, trapezoid-weighted.
    pub fn l2_norm(&self) -> f64 {
        let squares: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        math::sqrt(trapezoid(self.grid.h(), &squares))
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .fold(0.0, |m, &v| f64::max(m, math::abs(v)))
    }

    pub(crate) fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Composite trapezoid rule for equally spaced samples.
pub fn trapezoid(h: f64, values: &[f64]) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => h * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}

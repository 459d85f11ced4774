//! Dense symmetric matrices and the cyclic Jacobi eigensolver.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    /// Builds from a closure; the result is symmetrized as `(M + Mᵀ) / 2`.
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m.symmetrize();
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn symmetrize(&mut self) {
        let n = self.dim;
        for i in 0..n {
            for j in i + 1..n {
                let v = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = v;
                self.data[j * n + i] = v;
            }
        }
    }

    /// Leading `k × k` principal submatrix.
    pub fn leading(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.dim {
            return Err(Error::InvalidDimension(alloc::format!(
                "leading block {k} of a {0}x{0} matrix",
                self.dim
            )));
        }
        Ok(Self::from_fn(k, |i, j| self.get(i, j)))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        math::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    fn off_diagonal(&self) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += self.data[i * n + j] * self.data[i * n + j];
                }
            }
        }
        math::sqrt(s)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// Eigenvalues in ascending order; `vectors[k]` pairs with `values[k]` and has
/// unit Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

pub const MAX_SWEEPS: usize = 100;

/// Full eigendecomposition by cyclic Jacobi rotations.
///
/// Stops once the off-diagonal norm is at most `1e-12 ‖A‖_F`.
pub fn jacobi(matrix: &SymmetricMatrix) -> Result<Eigen> {
    let n = matrix.dim();
    if n == 0 {
        return Err(Error::InvalidDimension("empty matrix".into()));
    }
    if let Some(k) = matrix.data.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteForm(k / n, k % n));
    }
    let mut a = matrix.clone();
    let mut v = SymmetricMatrix::zeros(n);
    for i in 0..n {
        v.data[i * n + i] = 1.0;
    }
    let target = 1e-12 * matrix.frobenius();
    let mut sweeps = 0;
    while a.off_diagonal() > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: a.off_diagonal(),
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).total_cmp(&a.get(j, j)));
    let values = order.iter().map(|&k| a.get(k, k)).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v.data[i * n + k]).collect())
        .collect();
    Ok(Eigen { values, vectors })
}

/// Zeroes `a[p][q]` with one rotation; accumulates it into the columns of `v`.
fn rotate(a: &mut SymmetricMatrix, v: &mut SymmetricMatrix, p: usize, q: usize) {
    let n = a.dim;
    let apq = a.get(p, q);
    if apq == 0.0 {
        return;
    }
    let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
    let t = theta.signum() / (math::abs(theta) + math::hypot(theta, 1.0));
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / math::sqrt(t * t + 1.0);
    let s = t * c;
    for k in 0..n {
        let akp = a.data[k * n + p];
        let akq = a.data[k * n + q];
        a.data[k * n + p] = c * akp - s * akq;
        a.data[k * n + q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a.data[p * n + k];
        let aqk = a.data[q * n + k];
        a.data[p * n + k] = c * apk - s * aqk;
        a.data[q * n + k] = s * apk + c * aqk;
    }
    a.data[p * n + q] = 0.0;
    a.data[q * n + p] = 0.0;
    for k in 0..n {
        let vkp = v.data[k * n + p];
        let vkq = v.data[k * n + q];
        v.data[k * n + p] = c * vkp - s * vkq;
        v.data[k * n + q] = s * vkp + c * vkq;
    }
}

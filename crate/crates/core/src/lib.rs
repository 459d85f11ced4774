//! Numerical toolkit for the regular fractional Sturm–Liouville problem
//!
//! ```text
//!   cD^α_{b-} [ p(x) cD^α_{a+} y ](x) + q(x) y(x) = λ w(x) y(x),   y(a) = y(b) = 0
//! ```
//!
//! with Caputo derivatives of order 1/2 < α < 1.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised bottom-up:
//!
//! * [`grid`]: uniform grids and sampled functions;
//! * [`fraccalc`]: Riemann–Liouville integrals, Riemann–Liouville and Caputo
//!   derivatives discretised by product integration, plus the operator identity
//!   checks in [`fraccalc::identities`];
//! * [`problem`]: problem instances, coefficient fields and admissibility checks;
//! * [`ritz`]: the weighted-sine Ritz scheme, sphere-constrained minimisation through a
//!   symmetric eigendecomposition ([`eigen`]) and convergence traces in the basis size;
//! * [`analysis`]: energy / constraint functionals, Rayleigh quotient checks, strong-form
//!   residuals and the fractional-oscillator eigenvalue inequalities.
//!
//! File formats and the command-line driver live in the companion `fracsl` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod eigen;
mod error;
pub mod fraccalc;
pub mod grid;
mod math;
pub mod problem;
pub mod ritz;
pub mod special;

pub use error::{Error, Result};
pub use fraccalc::FractionalOrder;
pub use grid::{Grid, SampledFunction};
pub use problem::{CoefficientField, ProblemSpec};

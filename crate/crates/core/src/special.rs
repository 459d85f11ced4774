//! Euler's gamma function for positive real arguments.

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math;

const LANCZOS_G: f64 = 7.0;

// Lanczos coefficients for g = 7, n = 9 (Godfrey).
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(z) for `z > 0`.
///
/// Lanczos approximation on `z >= 1/2`; smaller arguments are shifted up with
/// `Γ(z) = Γ(z + 1) / z`, which keeps full relative accuracy near the pole at 0.
pub fn gamma(z: f64) -> Result<f64> {
    if z.is_nan() || z <= 0.0 || z.is_infinite() {
        return Err(Error::GammaDomain(z));
    }
    if z < 0.5 {
        return Ok(lanczos(z + 1.0) / z);
    }
    Ok(lanczos(z))
}

fn lanczos(z: f64) -> f64 {
    // Exact at the positive integers that fit; avoids the last-ulp wobble of
    // the series for the common Γ(1), Γ(2), ... arguments.
    if z == libm::floor(z) && z <= 23.0 {
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < z {
            acc *= k;
            k += 1.0;
        }
        return acc;
    }
    let x = z - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    // t^(x+1/2) e^-t split in two halves so large arguments do not overflow early.
    let half = math::powf(t, 0.5 * (x + 0.5));
    math::sqrt(2.0 * PI) * half * (half * math::exp(-t)) * series
}

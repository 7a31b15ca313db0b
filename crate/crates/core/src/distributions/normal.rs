//! Standard normal helpers.

use statrs::function::erf::{erfc, erfc_inv};
use std::f64::consts::{PI, SQRT_2};

pub(crate) const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub(crate) fn cdf(z: f64) -> f64 {
    if z == f64::NEG_INFINITY {
        return 0.0;
    }
    if z == f64::INFINITY {
        return 1.0;
    }
    0.5 * erfc(-z / SQRT_2)
}

/// Upper tail `1 - cdf(z)` without cancellation.
pub(crate) fn sf(z: f64) -> f64 {
    cdf(-z)
}

pub(crate) fn pdf(z: f64) -> f64 {
    if z.is_infinite() {
        return 0.0;
    }
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

pub(crate) fn ln_pdf(z: f64) -> f64 {
    -0.5 * z * z - 0.5 * (2.0 * PI).ln()
}

/// Inverse of `cdf` on `(0, 1)`.
pub(crate) fn quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let z = -SQRT_2 * erfc_inv(2.0 * p);
    // One Newton step sharpens the rational approximation to full precision.
    let d = pdf(z);
    if d > 0.0 {
        let err = if z > 0.0 { (1.0 - p) - sf(z) } else { cdf(z) - p };
        z - err / d
    } else {
        z
    }
}

/// `z` with `sf(z) = tail`, for tails as small as `1e-300`.
pub(crate) fn upper_quantile(tail: f64) -> f64 {
    -quantile(tail.clamp(1e-300, 0.5))
}

//! Standard Gaussian tail probabilities and their logarithms.
//!
//! `log_gaussian_tail` stays finite and accurate far beyond the point where
//! `gaussian_tail` underflows; the scaled form `ln Q(x) + x²/2` is what the
//! Gaussian⊛Laplace density is built on.

use libm::erfc;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{domain, Result};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const LN_2: f64 = std::f64::consts::LN_2;

/// Below this argument `erfc(z)·exp(z²)` is evaluated directly; above it the
/// continued fraction converges in a handful of terms.
const ERFCX_CF_CUTOFF: f64 = 5.0;

/// Scaled complementary error function `exp(z²)·erfc(z)` for `z ≥ 0`.
fn erfcx_nonneg(z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    if z < ERFCX_CF_CUTOFF {
        return erfc(z) * (z * z).exp();
    }
    // erfc(z) = exp(-z²)/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    // evaluated with the modified Lentz algorithm.
    let tiny = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64 * 0.5;
        d = z + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        d = 1.0 / d;
        c = z + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    FRAC_1_SQRT_PI / f
}

/// Q(x) = P(Z > x) for a standard normal Z.
pub fn gaussian_tail(x: f64) -> f64 {
    0.5 * erfc(x * std::f64::consts::FRAC_1_SQRT_2)
}

/// `ln Q(x) + x²/2`, finite for every finite `x`.
pub fn log_scaled_gaussian_tail(x: f64) -> f64 {
    if x < 1.0 {
        gaussian_tail(x).ln() + 0.5 * x * x
    } else {
        erfcx_nonneg(x * std::f64::consts::FRAC_1_SQRT_2).ln() - LN_2
    }
}

/// ln Q(x).
pub fn log_gaussian_tail(x: f64) -> f64 {
    if x < 0.0 {
        (-gaussian_tail(-x)).ln_1p()
    } else if x < 1.0 {
        gaussian_tail(x).ln()
    } else {
        log_scaled_gaussian_tail(x) - 0.5 * x * x
    }
}

/// Q⁻¹(ε), the point whose upper Gaussian tail has probability `eps`.
pub fn inverse_gaussian_tail(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(format!("tail probability {eps} outside (0, 1)")));
    }
    let std_normal = Normal::standard();
    let x = -std_normal.inverse_cdf(eps);
    // One Newton step on ln Q(x) = ln ε polishes the inverse.
    let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let q = gaussian_tail(x);
    if q > 0.0 && density > 0.0 {
        return Ok(x + (q - eps) / density);
    }
    Ok(x)
}

//! Density and distribution function of a read voltage whose noise is the
//! sum of a Gaussian and an independent zero-mean Laplace variable.
//!
//! With `z = y - μ`, `u± = ±z/σ + σ/λ` the density is
//! `(1/2λ)·[exp(-z²/2σ² + s(u+)) + exp(-z²/2σ² + s(u-))]` where
//! `s(u) = ln Q(u) + u²/2`. Written this way nothing overflows even when
//! `σ/λ` is in the hundreds.

use super::params::NoiseSpec;
use crate::error::{domain, Error, Result};
use crate::special::{gaussian_tail, log_gaussian_tail, log_scaled_gaussian_tail};

pub(crate) fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + (-(a - b).abs()).exp().ln_1p()
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// `ln[exp(σ²/2λ² + sign·z/λ)·Q(sign·z/σ + σ/λ)]`, choosing the
/// algebraically equivalent form that avoids large cancellations.
fn log_tilted_tail(z: f64, sigma: f64, lambda: f64, sign: f64) -> f64 {
    let ratio = sigma / lambda;
    let u = sign * z / sigma + ratio;
    if u >= 1.0 {
        -0.5 * (z / sigma) * (z / sigma) + log_scaled_gaussian_tail(u)
    } else {
        0.5 * ratio * ratio + sign * z / lambda + log_gaussian_tail(u)
    }
}

/// Natural log of the read-voltage density at `y`.
pub fn log_conditional_density(y: f64, spec: &NoiseSpec) -> Result<f64> {
    if !y.is_finite() {
        return Err(domain(format!("read voltage {y} is not finite")));
    }
    Ok(log_density_unchecked(y, spec))
}

pub(crate) fn log_density_unchecked(y: f64, spec: &NoiseSpec) -> f64 {
    let sigma = spec.sigma();
    let z = y - spec.mu;
    let a = log_tilted_tail(z, sigma, spec.lambda, 1.0);
    let b = log_tilted_tail(z, sigma, spec.lambda, -1.0);
    log_add_exp(a, b) - (2.0 * spec.lambda).ln()
}

/// Log of the equal-weight mixture of the level densities, i.e. the read
/// density when all levels are equally likely.
pub fn output_log_density(y: f64, specs: &[NoiseSpec]) -> Result<f64> {
    if specs.is_empty() {
        return Err(Error::InvalidParams("output density needs at least one level".into()));
    }
    if !y.is_finite() {
        return Err(domain(format!("read voltage {y} is not finite")));
    }
    let logs: Vec<f64> = specs.iter().map(|s| log_density_unchecked(y, s)).collect();
    Ok(log_sum_exp(&logs) - (specs.len() as f64).ln())
}

/// P(Y ≤ μ + z) for `z ≤ 0`.
fn lower_tail(z: f64, spec: &NoiseSpec) -> f64 {
    debug_assert!(z <= 0.0);
    if z == f64::NEG_INFINITY {
        return 0.0;
    }
    let sigma = spec.sigma();
    let t_plus = log_tilted_tail(z, sigma, spec.lambda, 1.0).exp();
    let t_minus = log_tilted_tail(z, sigma, spec.lambda, -1.0).exp();
    (gaussian_tail(-z / sigma) - 0.5 * t_minus + 0.5 * t_plus).max(0.0)
}

/// P(Y ≤ y).
pub fn conditional_cdf(y: f64, spec: &NoiseSpec) -> f64 {
    let z = y - spec.mu;
    if z <= 0.0 {
        lower_tail(z, spec)
    } else {
        1.0 - lower_tail(-z, spec)
    }
}

/// P(Y > y), accurate in the upper tail.
pub fn conditional_sf(y: f64, spec: &NoiseSpec) -> f64 {
    let z = y - spec.mu;
    if z >= 0.0 {
        lower_tail(-z, spec)
    } else {
        1.0 - lower_tail(z, spec)
    }
}

/// P(lo < Y ≤ hi); either bound may be infinite.
pub fn interval_probability(lo: f64, hi: f64, spec: &NoiseSpec) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let p = if hi <= spec.mu {
        conditional_cdf(hi, spec) - conditional_cdf(lo, spec)
    } else if lo >= spec.mu {
        conditional_sf(lo, spec) - conditional_sf(hi, spec)
    } else {
        1.0 - conditional_cdf(lo, spec) - conditional_sf(hi, spec)
    };
    p.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(mu: f64, sigma: f64, lambda: f64) -> NoiseSpec {
        NoiseSpec::new(mu, sigma * sigma, lambda).unwrap()
    }

    #[test]
    fn peak_value_matches_closed_form() {
        let s = spec(5.2, 0.05, 9.9e-3);
        let r: f64 = 0.05 / 9.9e-3;
        let expected = (0.5 * r * r + log_gaussian_tail(r)) - 9.9e-3f64.ln();
        let got = log_conditional_density(5.2, &s).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn exact_symmetry() {
        for s in [spec(1.0, 0.05, 1.26e-3), spec(-2.0, 0.3, 0.9), spec(0.0, 1e-3, 0.1)] {
            for d in [0.0, 1e-4, 0.01, 0.1, 1.0, 5.0] {
                let a = log_conditional_density(s.mu + d, &s).unwrap();
                let b = log_conditional_density(s.mu - d, &s).unwrap();
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{s:?} d={d}");
            }
        }
    }

    #[test]
    fn finite_far_out_and_at_large_ratio() {
        let s = spec(0.0, 1.0, 1e-4);
        for y in [-1e3, -50.0, 0.0, 50.0, 1e3] {
            assert!(log_conditional_density(y, &s).unwrap().is_finite());
        }
        assert!(log_conditional_density(f64::NAN, &s).is_err());
        assert!(log_conditional_density(f64::INFINITY, &s).is_err());
    }

    #[test]
    fn gaussian_limit_when_laplace_vanishes() {
        let s = spec(0.3, 0.2, 1e-7);
        for y in [-0.2, 0.1, 0.3, 0.55] {
            let z: f64 = (y - 0.3) / 0.2;
            let gauss = -0.5 * z * z - (0.2 * (2.0 * std::f64::consts::PI).sqrt()).ln();
            let got = log_conditional_density(y, &s).unwrap();
            assert!((got - gauss).abs() < 1e-5, "y={y}: {got} vs {gauss}");
        }
    }

    #[test]
    fn cdf_complements() {
        let s = spec(2.0, 0.1, 0.03);
        for y in [1.5, 1.9, 2.0, 2.1, 2.6] {
            assert!((conditional_cdf(y, &s) + conditional_sf(y, &s) - 1.0).abs() < 1e-15);
        }
        assert_eq!(conditional_cdf(2.0, &s), 0.5);
        assert_eq!(interval_probability(f64::NEG_INFINITY, f64::INFINITY, &s), 1.0);
    }

    #[test]
    fn mixture_edge_cases() {
        let s = spec(5.2, 0.05, 1.26e-3);
        let single = log_conditional_density(5.21, &s).unwrap();
        assert!((output_log_density(5.21, &[s]).unwrap() - single).abs() < 1e-14);
        assert!((output_log_density(5.21, &[s, s, s, s]).unwrap() - single).abs() < 1e-14);
        assert!(output_log_density(5.21, &[]).is_err());
    }
}

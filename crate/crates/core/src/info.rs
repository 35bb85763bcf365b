//! Uniform-input mutual information of the read channel (the instantaneous
//! storage capacity), its dispersion, and the normal-approximation rate.
//!
//! Everything is integrated in nats on one shared set of breakpoints and
//! reported in bits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{conditional_cdf, conditional_sf, draw_read, log_density_unchecked, log_sum_exp, NoiseSpec};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::special::inverse_gaussian_tail;

const LN_2: f64 = std::f64::consts::LN_2;

/// Samples per deterministic RNG stream in the Monte-Carlo estimators.
pub const MC_CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MiMethod {
    Quadrature,
    MonteCarlo,
}

/// A mutual-information value in bits with its standard error (zero for
/// deterministic quadrature).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiEstimate {
    pub value: f64,
    pub stderr: f64,
    pub method: MiMethod,
}

fn validate_specs(specs: &[NoiseSpec], min_levels: usize) -> Result<()> {
    if specs.len() < min_levels {
        return Err(Error::InvalidParams(format!("need at least {min_levels} levels, got {}", specs.len())));
    }
    specs.iter().try_for_each(NoiseSpec::validate)
}

/// Half-width around `mu` outside which the level carries less than
/// `tail_mass` probability.
fn support_half_width(spec: &NoiseSpec, cfg: &QuadratureConfig) -> f64 {
    let pad = &cfg.support_padding;
    let mut w = pad.sigmas * spec.sigma() + pad.lambdas * spec.lambda;
    for _ in 0..64 {
        let outside = conditional_cdf(spec.mu - w, spec) + conditional_sf(spec.mu + w, spec);
        if outside <= pad.tail_mass {
            break;
        }
        w *= 1.5;
    }
    w
}

/// Sorted breakpoints covering the support of every level, with extra cuts
/// at each level's mean and ±3σ so the integrator starts near the peaks.
pub(crate) fn breakpoints(specs: &[NoiseSpec], cfg: &QuadratureConfig) -> Vec<f64> {
    let widths: Vec<f64> = specs.iter().map(|s| support_half_width(s, cfg)).collect();
    let lo = specs.iter().zip(&widths).map(|(s, w)| s.mu - w).fold(f64::INFINITY, f64::min);
    let hi = specs.iter().zip(&widths).map(|(s, w)| s.mu + w).fold(f64::NEG_INFINITY, f64::max);
    let mut points = vec![lo, hi];
    for s in specs {
        let spread = 3.0 * s.sigma() + 3.0 * s.lambda;
        points.extend([s.mu - spread, s.mu, s.mu + spread]);
    }
    points.retain(|p| *p >= lo && *p <= hi);
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

/// `ln f(y|x_i)` for every level and `ln f(y)` of the uniform mixture.
fn log_densities(y: f64, specs: &[NoiseSpec], buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    buf.extend(specs.iter().map(|s| log_density_unchecked(y, s)));
    log_sum_exp(buf) - (specs.len() as f64).ln()
}

/// ∫ (1/L) Σ_i f_i(y)·g(ln f_i(y) − ln f(y)) dy in nats.
fn integrate_information<G: Fn(f64) -> f64>(specs: &[NoiseSpec], cfg: &QuadratureConfig, g: G) -> Result<f64> {
    let points = breakpoints(specs, cfg);
    let mut buf = Vec::with_capacity(specs.len());
    let inv_l = 1.0 / specs.len() as f64;
    let integral = integrate(
        |y| {
            let log_mix = log_densities(y, specs, &mut buf);
            buf.iter().filter(|l| l.is_finite()).map(|&l| l.exp() * g(l - log_mix)).sum::<f64>() * inv_l
        },
        &points,
        cfg,
    )?;
    Ok(integral.value)
}

/// Mutual information between an equally likely level and its read
/// voltage, by adaptive quadrature.
pub fn mutual_information(specs: &[NoiseSpec], cfg: &QuadratureConfig) -> Result<MiEstimate> {
    validate_specs(specs, 2)?;
    let nats = integrate_information(specs, cfg, |d| d)?;
    let max_bits = (specs.len() as f64).log2();
    Ok(MiEstimate { value: (nats / LN_2).clamp(0.0, max_bits), stderr: 0.0, method: MiMethod::Quadrature })
}

/// Variance of the information density `log2 f(y|x)/f(y)` under equally
/// likely inputs, in bits².
pub fn channel_dispersion(specs: &[NoiseSpec], cfg: &QuadratureConfig) -> Result<f64> {
    validate_specs(specs, 2)?;
    let first = integrate_information(specs, cfg, |d| d)?;
    let second = integrate_information(specs, cfg, |d| d * d)?;
    Ok(((second - first * first) / (LN_2 * LN_2)).max(0.0))
}

/// Sample moments of the information density in bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoDensityMoments {
    pub samples: usize,
    pub mean: f64,
    pub mean_stderr: f64,
    pub variance: f64,
    pub variance_stderr: f64,
}

/// Draws `n_samples` (level, read) pairs and accumulates power sums of the
/// information density. Stream `k` of the seed covers samples
/// `k·MC_CHUNK .. (k+1)·MC_CHUNK`, and chunk sums are combined in stream
/// order, so the result does not depend on the thread count.
pub fn information_density_moments_mc(specs: &[NoiseSpec], n_samples: usize, seed: u64) -> Result<InfoDensityMoments> {
    validate_specs(specs, 1)?;
    if n_samples < 1000 {
        return Err(Error::InsufficientData(format!("Monte-Carlo needs >= 1000 samples, got {n_samples}")));
    }
    let chunks = n_samples.div_ceil(MC_CHUNK);
    let partial: Vec<[f64; 4]> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let count = MC_CHUNK.min(n_samples - k * MC_CHUNK);
            let mut buf = Vec::with_capacity(specs.len());
            let mut sums = [0.0; 4];
            for _ in 0..count {
                let level = rng.random_range(0..specs.len());
                let y = draw_read(&specs[level], &mut rng);
                let log_mix = log_densities(y, specs, &mut buf);
                let i = (buf[level] - log_mix) / LN_2;
                let i2 = i * i;
                sums[0] += i;
                sums[1] += i2;
                sums[2] += i2 * i;
                sums[3] += i2 * i2;
            }
            sums
        })
        .collect();
    let mut s = [0.0; 4];
    for p in &partial {
        for j in 0..4 {
            s[j] += p[j];
        }
    }
    let n = n_samples as f64;
    let (m1, m2, m3, m4) = (s[0] / n, s[1] / n, s[2] / n, s[3] / n);
    let var = (m2 - m1 * m1).max(0.0);
    let central4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1.powi(4);
    let sample_var = var * n / (n - 1.0);
    Ok(InfoDensityMoments {
        samples: n_samples,
        mean: m1,
        mean_stderr: (sample_var / n).sqrt(),
        variance: sample_var,
        variance_stderr: ((central4 - var * var).max(0.0) / n).sqrt(),
    })
}

/// Monte-Carlo estimate of the uniform-input mutual information.
pub fn mutual_information_mc(specs: &[NoiseSpec], n_samples: usize, seed: u64) -> Result<MiEstimate> {
    let m = information_density_moments_mc(specs, n_samples, seed)?;
    Ok(MiEstimate { value: m.mean, stderr: m.mean_stderr, method: MiMethod::MonteCarlo })
}

/// Rate achievable at blocklength `n` and block error probability `eps`
/// under the normal approximation `C − √(V/n)·Q⁻¹(ε)`, logarithmic term
/// dropped.
pub fn normal_approx_rate(n: u64, eps: f64, capacity: f64, dispersion: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("blocklength must be >= 1".into()));
    }
    if !(dispersion >= 0.0) {
        return Err(Error::Domain(format!("dispersion {dispersion} must be >= 0")));
    }
    let q_inv = inverse_gaussian_tail(eps)?;
    Ok(capacity - (dispersion / n as f64).sqrt() * q_inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_levels(spacing: f64, sigma: f64, lambda: f64) -> Vec<NoiseSpec> {
        (0..4).map(|i| NoiseSpec::new(i as f64 * spacing, sigma * sigma, lambda).unwrap()).collect()
    }

    #[test]
    fn identical_levels_carry_nothing() {
        let s = NoiseSpec::new(5.2, 0.0025, 1e-2).unwrap();
        let cfg = QuadratureConfig::default();
        let mi = mutual_information(&[s; 4], &cfg).unwrap();
        assert!(mi.value.abs() < 1e-9);
        assert_eq!(mi.stderr, 0.0);
        assert!(channel_dispersion(&[s; 4], &cfg).unwrap().abs() < 1e-9);
    }

    #[test]
    fn well_separated_levels_reach_two_bits() {
        let mi = mutual_information(&four_levels(5.0, 0.05, 1e-6), &QuadratureConfig::default()).unwrap();
        assert!((mi.value - 2.0).abs() < 1e-4, "{}", mi.value);
    }

    #[test]
    fn dispersion_vanishes_with_separation() {
        let cfg = QuadratureConfig::default();
        let v: Vec<f64> = [2.0, 3.0, 4.0]
            .iter()
            .map(|sep| channel_dispersion(&four_levels(*sep, 1.0, 0.05), &cfg).unwrap())
            .collect();
        assert!(v[0] > v[1] && v[1] > v[2] && v[2] >= 0.0, "{v:?}");
    }

    #[test]
    fn needs_two_levels() {
        let s = NoiseSpec::new(0.0, 1.0, 1.0).unwrap();
        assert!(mutual_information(&[s], &QuadratureConfig::default()).is_err());
        assert!(mutual_information_mc(&[s, s], 10, 1).is_err());
    }

    #[test]
    fn mc_is_seed_deterministic() {
        let specs = four_levels(0.3, 0.1, 0.02);
        let a = mutual_information_mc(&specs, 5000, 9).unwrap();
        let b = mutual_information_mc(&specs, 5000, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.method, MiMethod::MonteCarlo);
    }

    #[test]
    fn mc_identical_levels() {
        let s = NoiseSpec::new(1.0, 0.01, 0.01).unwrap();
        let m = mutual_information_mc(&[s; 4], 20_000, 3).unwrap();
        assert!(m.value.abs() <= 3.0 * m.stderr + 1e-12);
    }

    #[test]
    fn mc_thread_count_does_not_matter() {
        let specs = four_levels(0.3, 0.1, 0.02);
        let n = 3 * MC_CHUNK + 17;
        let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let wide = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = serial.install(|| information_density_moments_mc(&specs, n, 5).unwrap());
        let b = wide.install(|| information_density_moments_mc(&specs, n, 5).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn normal_approximation_trivia() {
        assert_eq!(normal_approx_rate(1000, 1e-3, 1.92, 0.0).unwrap(), 1.92);
        assert_eq!(normal_approx_rate(1000, 0.5, 1.92, 0.3).unwrap(), 1.92);
        assert!(normal_approx_rate(1000, 0.0, 1.92, 0.3).is_err());
        assert!(normal_approx_rate(1000, 1.0, 1.92, 0.3).is_err());
        assert!(normal_approx_rate(0, 0.1, 1.92, 0.3).is_err());
        assert!(normal_approx_rate(10, 0.1, 1.92, -1.0).is_err());
    }

    #[test]
    fn normal_approximation_monotone() {
        let mut prev = f64::NEG_INFINITY;
        for n in [10u64, 100, 1000, 10_000, 100_000] {
            let r = normal_approx_rate(n, 1e-3, 1.9, 0.2).unwrap();
            assert!(r > prev);
            prev = r;
        }
        let mut prev = f64::NEG_INFINITY;
        for eps in [1e-9, 1e-6, 1e-3, 0.1, 0.4] {
            let r = normal_approx_rate(1000, eps, 1.9, 0.2).unwrap();
            assert!(r > prev);
            prev = r;
        }
    }
}

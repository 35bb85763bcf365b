use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::noise::level_noise_spec;
use super::params::{DeviceParams, NoiseSpec, WearState};
use crate::error::Result;

/// Draws one read voltage `mu + N(0, σ²) + Laplace(0, λ)`.
pub fn draw_read<R: Rng + ?Sized>(spec: &NoiseSpec, rng: &mut R) -> f64 {
    let gauss: f64 = rng.sample(StandardNormal);
    // Inverse-CDF Laplace draw from u ∈ (-1/2, 1/2).
    let u: f64 = rng.random::<f64>() - 0.5;
    let laplace = -spec.lambda * u.signum() * (1.0 - 2.0 * u.abs()).ln();
    spec.mu + spec.sigma() * gauss + laplace
}

/// One simulated read of a cell written at `level_index`, reproducible
/// from `seed`.
pub fn sample_read(level_index: usize, state: &WearState, t: f64, params: &DeviceParams, seed: u64) -> Result<f64> {
    let spec = level_noise_spec(level_index, state, t, params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(draw_read(&spec, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_under_seed() {
        let p = DeviceParams::default();
        let s = WearState::new(1000.0, 400, 0.8).unwrap();
        let a = sample_read(2, &s, 100.0, &p, 42).unwrap();
        let b = sample_read(2, &s, 100.0, &p, 42).unwrap();
        let c = sample_read(2, &s, 100.0, &p, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(sample_read(9, &s, 100.0, &p, 42).is_err());
    }

    #[test]
    fn laplace_component_variance() {
        // Laplace(0, λ) has variance 2λ²; with a tiny Gaussian part the total
        // variance is ≈ σ² + 2λ².
        let spec = NoiseSpec::new(0.0, 1e-8, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        let draws: Vec<f64> = (0..n).map(|_| draw_read(&spec, &mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var - 0.5).abs() < 0.02, "{var}");
    }
}

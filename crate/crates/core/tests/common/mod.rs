//! Oracles shared by the integration tests. Nothing here calls into the
//! density code under test.

#![allow(dead_code)]

use std::f64::consts::PI;

/// 10-point Gauss–Legendre nodes and weights on [-1, 1].
const GL_X: [f64; 5] = [
    0.148_874_338_981_631_2,
    0.433_395_394_129_247_2,
    0.679_409_568_299_024_4,
    0.865_063_366_688_984_5,
    0.973_906_528_517_171_7,
];
const GL_W: [f64; 5] = [
    0.295_524_224_714_752_9,
    0.269_266_719_309_996_4,
    0.219_086_362_515_982_0,
    0.149_451_349_150_580_6,
    0.066_671_344_308_688_1,
];

/// Composite 10-point Gauss–Legendre over `[a, b]` with panels no wider
/// than `h`, split additionally at `cuts`.
pub fn composite_gl<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, h: f64, cuts: &[f64]) -> f64 {
    let mut points = vec![a, b];
    points.extend(cuts.iter().copied().filter(|c| *c > a && *c < b));
    points.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in points.windows(2) {
        let n = ((w[1] - w[0]) / h).ceil().max(1.0) as usize;
        let step = (w[1] - w[0]) / n as f64;
        for k in 0..n {
            let lo = w[0] + k as f64 * step;
            let c = lo + 0.5 * step;
            let r = 0.5 * step;
            let mut s = 0.0;
            for j in 0..5 {
                s += GL_W[j] * (f(c - r * GL_X[j]) + f(c + r * GL_X[j]));
            }
            total += s * r;
        }
    }
    total
}

/// Gaussian(μ, σ²) ⊛ Laplace(0, λ) density at `y` by brute-force numerical
/// convolution over the Laplace variable.
pub fn convolution_density(y: f64, mu: f64, sigma: f64, lambda: f64) -> f64 {
    let z = y - mu;
    let gauss = |u: f64| (-0.5 * (u / sigma) * (u / sigma)).exp() / (sigma * (2.0 * PI).sqrt());
    let laplace = |w: f64| (-w.abs() / lambda).exp() / (2.0 * lambda);
    let reach = 40.0 * lambda + 14.0 * sigma;
    let lo = z.min(0.0) - reach;
    let hi = z.max(0.0) + reach;
    let h = sigma.min(lambda) / 8.0;
    composite_gl(|w| gauss(z - w) * laplace(w), lo, hi, h, &[0.0, z])
}

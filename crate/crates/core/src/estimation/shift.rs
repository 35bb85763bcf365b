//! Model-free estimate of a global shift between two histograms taken
//! with the same thresholds.

use super::histogram::Histogram;
use crate::error::{Error, Result};

/// Centre and width of every bin; the open outer bins get the width of
/// their inner neighbour (1 V when there is no inner bin).
fn bin_centres(hist: &Histogram) -> Vec<(f64, f64)> {
    let t = hist.thresholds.as_slice();
    let k = t.len();
    let first = if k >= 2 { t[1] - t[0] } else { 1.0 };
    let last = if k >= 2 { t[k - 1] - t[k - 2] } else { 1.0 };
    (0..=k)
        .map(|b| {
            let lo = if b == 0 { t[0] - first } else { t[b - 1] };
            let hi = if b == k { t[k - 1] + last } else { t[b] };
            (0.5 * (lo + hi), hi - lo)
        })
        .collect()
}

struct Masses(Vec<(f64, f64, f64)>);

impl Masses {
    fn new(hist: &Histogram, bins: &[(f64, f64)]) -> Self {
        let total = hist.total as f64;
        Self(
            bins.iter()
                .zip(&hist.counts)
                .filter(|(_, &n)| n > 0)
                .map(|(&(c, w), &n)| (c, w, n as f64 / total))
                .collect(),
        )
    }
}

/// Cross-correlation of the two bin-mass sequences at shift `s`. Each bin
/// mass is smeared with a Gaussian whose variance matches a uniform spread
/// over the bin, which makes the correlation smooth in `s`.
fn correlation(reference: &Masses, now: &Masses, s: f64) -> f64 {
    let mut acc = 0.0;
    for &(ci, wi, mi) in &reference.0 {
        for &(cj, wj, mj) in &now.0 {
            let var = (wi * wi + wj * wj) / 12.0;
            let d = cj - ci - s;
            acc += mi * mj * (-0.5 * d * d / var).exp() / var.sqrt();
        }
    }
    acc
}

/// Single global shift of `hist_now` relative to `hist_ref`, in volts;
/// negative when the current population sits to the left. Found by
/// maximizing the bin-mass cross-correlation over a symmetric grid of
/// shifts and refining the best grid point by golden section.
pub fn mean_shift(hist_ref: &Histogram, hist_now: &Histogram) -> Result<f64> {
    if hist_ref.thresholds != hist_now.thresholds {
        return Err(Error::MismatchedThresholds);
    }
    if hist_ref.total == 0 || hist_now.total == 0 {
        return Err(Error::InsufficientData("mean shift needs two non-empty histograms".into()));
    }
    if hist_ref.counts == hist_now.counts {
        return Ok(0.0);
    }
    let bins = bin_centres(hist_ref);
    let g = Masses::new(hist_ref, &bins);
    let h = Masses::new(hist_now, &bins);
    let min_width = bins.iter().map(|b| b.1).fold(f64::INFINITY, f64::min);
    let span = bins.last().map(|b| b.0 + b.1).unwrap_or(0.0) - bins.first().map(|b| b.0 - b.1).unwrap_or(0.0);
    let step = min_width / 20.0;
    let half = (span / step).ceil() as i64;
    let (mut best_s, mut best_v) = (0.0f64, f64::NEG_INFINITY);
    for k in -half..=half {
        let s = k as f64 * step;
        let v = correlation(&g, &h, s);
        if v > best_v || (v == best_v && s.abs() < best_s.abs()) {
            best_s = s;
            best_v = v;
        }
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best_s - step, best_s + step);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (correlation(&g, &h, c), correlation(&g, &h, d));
    while b - a > 1e-9 * min_width {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = correlation(&g, &h, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = correlation(&g, &h, d);
        }
    }
    Ok(0.5 * (a + b))
}

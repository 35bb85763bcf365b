//! Maximum-likelihood fit of accumulated voltage (and optionally retention
//! time) to a binned read histogram.

use super::histogram::{Histogram, ReadThresholds};
use crate::allocation::capacity_raw;
use crate::channel::{channel_specs, interval_probability, DeviceParams, WearState};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;

/// Histograms smaller than this are rejected by the fitter.
pub const MIN_FIT_TOTAL: u64 = 100;

/// Probability that a cell written at level `i` reads in bin `b`, for every
/// level (rows) and bin (columns).
pub fn bin_probabilities(
    state: &WearState,
    t: f64,
    params: &DeviceParams,
    thresholds: &ReadThresholds,
) -> Result<Vec<Vec<f64>>> {
    state.validate()?;
    bin_probabilities_raw(state.v_acc, state.alpha, t, params, thresholds)
}

pub(crate) fn bin_probabilities_raw(
    v_acc: f64,
    alpha: f64,
    t: f64,
    params: &DeviceParams,
    thresholds: &ReadThresholds,
) -> Result<Vec<Vec<f64>>> {
    let specs = channel_specs(v_acc, alpha, t, params)?;
    Ok(specs
        .iter()
        .map(|spec| {
            (0..thresholds.num_bins())
                .map(|b| {
                    let (lo, hi) = thresholds.bin_edges(b);
                    interval_probability(lo, hi, spec)
                })
                .collect()
        })
        .collect())
}

/// Search ranges and tolerances of the fitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    /// Accumulated-voltage search range, volts; searched on a log scale.
    pub v_acc_range: (f64, f64),
    /// Retention-time search range, hours, used when the time is unknown.
    pub t_range: (f64, f64),
    pub grid_points: usize,
    /// Golden-section stopping width in log-parameter space.
    pub log_tol: f64,
    /// Retention horizon for `capacity_hat`; the fitted time when `None`.
    pub capacity_horizon: Option<f64>,
    pub quadrature: QuadratureConfig,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            v_acc_range: (1.0, 1e5),
            t_range: (0.01, 1e5),
            grid_points: 48,
            log_tol: 1e-6,
            capacity_horizon: None,
            quadrature: QuadratureConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WearEstimate {
    pub v_acc_hat: f64,
    pub t_hat: f64,
    /// Multinomial log-likelihood at the optimum, nats.
    pub log_likelihood: f64,
    pub capacity_hat: f64,
    /// False when the optimum sits on the edge of a search range.
    pub converged: bool,
}

const PROB_FLOOR: f64 = 1e-300;

/// `Σ_b n_b·ln(Σ_i P(b|i)/L)` at the given state.
pub fn histogram_log_likelihood(
    hist: &Histogram,
    v_acc: f64,
    alpha: f64,
    t: f64,
    params: &DeviceParams,
) -> Result<f64> {
    let probs = bin_probabilities_raw(v_acc, alpha, t, params, &hist.thresholds)?;
    let inv_l = 1.0 / probs.len() as f64;
    Ok(hist
        .counts
        .iter()
        .enumerate()
        .filter(|(_, &n)| n > 0)
        .map(|(b, &n)| {
            let p = probs.iter().map(|row| row[b]).sum::<f64>() * inv_l;
            n as f64 * p.max(PROB_FLOOR).ln()
        })
        .sum())
}

struct Maximum {
    arg: f64,
    value: f64,
    interior: bool,
}

/// Maximizes `f` on `[lo, hi]`: coarse grid, then golden section inside the
/// bracket around the best grid point.
fn maximize_1d<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64, grid: usize, tol: f64) -> Result<Maximum> {
    let n = grid.max(3);
    let xs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let mut values = Vec::with_capacity(n);
    for &x in &xs {
        values.push(f(x)?);
    }
    let best = (0..n).fold(0, |b, i| if values[i] > values[b] { i } else { b });
    let mut a = xs[best.saturating_sub(1)];
    let mut b = xs[(best + 1).min(n - 1)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let (mut arg, mut value) = if fc >= fd { (c, fc) } else { (d, fd) };
    if values[best] > value {
        arg = xs[best];
        value = values[best];
    }
    let edge = tol.max((hi - lo) * 1e-9);
    let interior = arg - lo > edge && hi - arg > edge;
    Ok(Maximum { arg, value, interior })
}

/// Fits the wear state that generated `hist`, written at scale `alpha`.
/// With `t_known` the search is over accumulated voltage only; otherwise
/// retention time is fitted too, by nesting the voltage search inside a
/// search over log time.
pub fn fit_wear_state(
    hist: &Histogram,
    params: &DeviceParams,
    alpha: f64,
    t_known: Option<f64>,
    cfg: &FitConfig,
) -> Result<WearEstimate> {
    if hist.total < MIN_FIT_TOTAL {
        return Err(Error::InsufficientData(format!(
            "histogram holds {} reads, at least {MIN_FIT_TOTAL} are needed",
            hist.total
        )));
    }
    params.validate()?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("scale factor {alpha} outside (0, 1]")));
    }
    let (v_lo, v_hi) = cfg.v_acc_range;
    if !(v_lo > 0.0 && v_hi > v_lo) {
        return Err(Error::InvalidParams("v_acc_range must satisfy 0 < lo < hi".into()));
    }
    let fit_v = |t: f64| -> Result<Maximum> {
        maximize_1d(
            |s| histogram_log_likelihood(hist, s.exp(), alpha, t, params),
            v_lo.ln(),
            v_hi.ln(),
            cfg.grid_points,
            cfg.log_tol,
        )
    };
    let (v_acc_hat, t_hat, log_likelihood, converged) = match t_known {
        Some(t) => {
            if !(t >= 0.0) {
                return Err(Error::Domain(format!("retention time {t} must be >= 0")));
            }
            let m = fit_v(t)?;
            (m.arg.exp(), t, m.value, m.interior)
        }
        None => {
            let (t_lo, t_hi) = cfg.t_range;
            if !(t_lo > 0.0 && t_hi > t_lo) {
                return Err(Error::InvalidParams("t_range must satisfy 0 < lo < hi".into()));
            }
            let mut inner_ok = true;
            let outer = maximize_1d(
                |tau| {
                    let m = fit_v(tau.exp())?;
                    Ok(m.value)
                },
                t_lo.ln(),
                t_hi.ln(),
                cfg.grid_points / 2,
                cfg.log_tol,
            )?;
            let t = outer.arg.exp();
            let inner = fit_v(t)?;
            inner_ok &= inner.interior;
            (inner.arg.exp(), t, inner.value, inner_ok && outer.interior)
        }
    };
    let horizon = cfg.capacity_horizon.unwrap_or(t_hat);
    let capacity_hat = capacity_raw(v_acc_hat, alpha, horizon, params, &cfg.quadrature)?;
    Ok(WearEstimate { v_acc_hat, t_hat, log_likelihood, capacity_hat, converged })
}

//! Programming, wear-out and retention noise as functions of accumulated
//! voltage and retention time.

use super::params::{DeviceParams, NoiseSpec, WearState};
use crate::error::{domain, Error, Result};

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(domain(format!("{name} must be finite and >= 0, got {v}")));
    }
    Ok(())
}

/// Laplace scale of the wear-out noise: `C_w + A_w·(V_acc/V_max)^k1`.
pub fn wear_scale(v_acc: f64, params: &DeviceParams) -> Result<f64> {
    check_nonneg("accumulated voltage", v_acc)?;
    Ok(params.c_w + params.a_w * (v_acc / params.v_max).powf(params.k1))
}

/// `A_r·r^k1 + B_r·r^k2` with `r = V_acc/V_max`.
fn retention_wear_factor(v_acc: f64, params: &DeviceParams) -> f64 {
    let r = v_acc / params.v_max;
    params.a_r * r.powf(params.k1) + params.b_r * r.powf(params.k2)
}

/// Mean and variance of the retention drift of a cell written at
/// `x_target` volts and read `t` hours later.
pub fn retention_moments(x_target: f64, v_acc: f64, t: f64, params: &DeviceParams) -> Result<(f64, f64)> {
    check_nonneg("target voltage", x_target)?;
    check_nonneg("accumulated voltage", v_acc)?;
    check_nonneg("retention time", t)?;
    let log_time = (t / params.t0).ln_1p();
    let wear = retention_wear_factor(v_acc, params);
    let mu_r = -x_target * log_time * wear;
    let sigma_r2 = 0.1 * x_target * log_time * wear * wear;
    Ok((mu_r, sigma_r2))
}

pub(crate) fn noise_at(level_index: usize, v_acc: f64, alpha: f64, t: f64, params: &DeviceParams) -> Result<NoiseSpec> {
    let levels = params.num_levels();
    if level_index >= levels {
        return Err(Error::LevelOutOfRange { index: level_index, levels });
    }
    let x = if level_index == 0 && !params.scale_erased {
        params.base_levels[0]
    } else {
        alpha * params.base_levels[level_index]
    };
    let (mu_r, sigma_r2) = retention_moments(x, v_acc, t, params)?;
    let sigma_prog = if level_index == 0 { params.sigma_e } else { params.sigma_p };
    NoiseSpec::new(x + mu_r, sigma_prog * sigma_prog + sigma_r2, wear_scale(v_acc, params)?)
}

/// Effective channel of level `level_index` for a population in `state`,
/// read `t` hours after writing.
pub fn level_noise_spec(level_index: usize, state: &WearState, t: f64, params: &DeviceParams) -> Result<NoiseSpec> {
    state.validate()?;
    noise_at(level_index, state.v_acc, state.alpha, t, params)
}

/// All `L` level channels at once.
pub fn level_noise_specs(state: &WearState, t: f64, params: &DeviceParams) -> Result<Vec<NoiseSpec>> {
    state.validate()?;
    channel_specs(state.v_acc, state.alpha, t, params)
}

pub(crate) fn channel_specs(v_acc: f64, alpha: f64, t: f64, params: &DeviceParams) -> Result<Vec<NoiseSpec>> {
    (0..params.num_levels()).map(|i| noise_at(i, v_acc, alpha, t, params)).collect()
}

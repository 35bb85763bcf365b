//! Read-channel model of a multi-level flash cell.
//!
//! A read returns `x + n_p + n_w + n_r`: programming noise (Gaussian, wider
//! for the erased level), wear-out noise (Laplace with a scale that grows
//! with accumulated voltage) and retention drift (Gaussian with negative
//! mean that grows with accumulated voltage and storage time).

mod density;
mod noise;
mod params;
mod sampling;

pub use density::{conditional_cdf, conditional_sf, interval_probability, log_conditional_density, output_log_density};
pub(crate) use density::{log_density_unchecked, log_sum_exp};
pub(crate) use noise::channel_specs;
pub use noise::{level_noise_spec, level_noise_specs, retention_moments, wear_scale};
pub(crate) use params::{check_increasing, DEVICE_KEYS};
pub use params::{DeviceParams, NoiseSpec, WearState};
pub use sampling::{draw_read, sample_read};

//! Read-channel model, instantaneous storage capacity and dynamic voltage
//! allocation for multi-level NAND flash.
//!
//! * [`channel`]: noise model and the Gaussian⊛Laplace read density.
//! * [`info`]: uniform-input mutual information, dispersion and the
//!   normal-approximation rate.
//! * [`allocation`]: the single-scale-factor voltage policy and lifetime
//!   simulation.
//! * [`estimation`]: histograms from quantized reads, wear fitting, drift
//!   detection and per-bin LLRs.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod channel;
pub mod config;
pub mod error;
pub mod estimation;
pub mod info;
pub mod quadrature;
pub mod special;

pub use allocation::{
    capacity_at, expected_cycle_increment, find_alpha, run_policy, simulate_lifetime, AlphaClamp, AlphaSolution,
    Checkpoint, LifetimeResult, PolicyConfig, PolicyMode, Termination,
};
pub use channel::{DeviceParams, NoiseSpec, WearState};
pub use config::KeyValues;
pub use error::{Error, Result};
pub use info::{
    channel_dispersion, mutual_information, mutual_information_mc, normal_approx_rate, MiEstimate, MiMethod,
};
pub use quadrature::QuadratureConfig;

/// Every key understood by the device and policy configuration.
pub fn known_config_keys() -> Vec<&'static str> {
    channel::DEVICE_KEYS.iter().chain(allocation::POLICY_KEYS).copied().collect()
}

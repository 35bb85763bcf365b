//! Benchmarks for the flashcap hot paths; see `benches/`.

use flashcap::channel::level_noise_specs;
use flashcap::{DeviceParams, NoiseSpec, WearState};

/// Four-level default channel at the given wear.
pub fn default_channel(alpha: f64, v_acc: f64, t: f64) -> Vec<NoiseSpec> {
    let p = DeviceParams::default();
    let state = WearState::from_accumulated(v_acc, alpha, &p).expect("valid state");
    level_noise_specs(&state, t, &p).expect("valid channel")
}

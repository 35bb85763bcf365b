//! Dynamic voltage allocation: scale all levels by one factor α, re-solved
//! every `adjust_period` P/E cycles so that the capacity at the retention
//! horizon stays at the target, and track accumulated voltage until the
//! capacity can no longer be held above the threshold.

use std::fmt;
use std::str::FromStr;

use crate::channel::{channel_specs, check_increasing, DeviceParams, WearState};
use crate::config::KeyValues;
use crate::error::{Error, Result};
use crate::info::mutual_information;
use crate::quadrature::QuadratureConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyMode {
    /// Levels stay at full scale (α ≡ 1).
    Fixed,
    /// α is re-solved each period to hold the target capacity.
    Dynamic,
}

impl FromStr for PolicyMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fixed" => Ok(Self::Fixed),
            "dynamic" => Ok(Self::Dynamic),
            other => Err(format!("expected `fixed` or `dynamic`, got `{other}`")),
        }
    }
}

impl fmt::Display for PolicyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Fixed => "fixed",
            Self::Dynamic => "dynamic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyConfig {
    pub mode: PolicyMode,
    /// Capacity the dynamic policy aims for, bits.
    pub target_mi: f64,
    /// Capacity below which the device is considered worn out, bits.
    pub capacity_threshold: f64,
    /// P/E cycles between re-solves of α.
    pub adjust_period: u64,
    /// Retention horizon at which capacity is evaluated, hours.
    pub retention_time: f64,
    pub alpha_min: f64,
    pub alpha_tol: f64,
    pub max_cycles: u64,
    pub quadrature: QuadratureConfig,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            mode: PolicyMode::Dynamic,
            target_mi: 1.92,
            capacity_threshold: 1.9,
            adjust_period: 100,
            retention_time: 8760.0,
            alpha_min: 0.05,
            alpha_tol: 1e-4,
            max_cycles: 20_000,
            quadrature: QuadratureConfig::default(),
        }
    }
}

pub(crate) const POLICY_KEYS: &[&str] = &[
    "mode",
    "target_mi",
    "capacity_threshold",
    "adjust_period",
    "retention_time",
    "alpha_min",
    "alpha_tol",
    "max_cycles",
    "quad_rel_tol",
    "quad_max_subdivisions",
];

impl PolicyConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if !(self.target_mi.is_finite() && self.capacity_threshold.is_finite()) {
            return bad("target_mi and capacity_threshold must be finite");
        }
        if !(self.alpha_min > 0.0 && self.alpha_min < 1.0) {
            return bad("alpha_min must lie in (0, 1)");
        }
        if !(self.alpha_tol > 0.0) {
            return bad("alpha_tol must be positive");
        }
        if self.adjust_period < 1 {
            return bad("adjust_period must be >= 1");
        }
        if !(self.retention_time >= 0.0) {
            return bad("retention_time must be >= 0");
        }
        self.quadrature.validate()
    }

    pub fn from_config(kv: &KeyValues) -> Result<Self> {
        let mut c = Self::default();
        if let Some(m) = kv.get::<PolicyMode>("mode")? {
            c.mode = m;
        }
        macro_rules! take {
            ($($field:ident: $ty:ty),*) => {$(
                if let Some(v) = kv.get::<$ty>(stringify!($field))? { c.$field = v; }
            )*};
        }
        take!(target_mi: f64, capacity_threshold: f64, adjust_period: u64, retention_time: f64,
              alpha_min: f64, alpha_tol: f64, max_cycles: u64);
        if let Some(v) = kv.get::<f64>("quad_rel_tol")? {
            c.quadrature.rel_tol = v;
        }
        if let Some(v) = kv.get::<usize>("quad_max_subdivisions")? {
            c.quadrature.max_subdivisions = v;
        }
        c.validate().map_err(|e| Error::Config { key: "policy".into(), msg: e.to_string() })?;
        Ok(c)
    }

    pub fn to_config(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.set("mode", self.mode);
        kv.set("target_mi", self.target_mi);
        kv.set("capacity_threshold", self.capacity_threshold);
        kv.set("adjust_period", self.adjust_period);
        kv.set("retention_time", self.retention_time);
        kv.set("alpha_min", self.alpha_min);
        kv.set("alpha_tol", self.alpha_tol);
        kv.set("max_cycles", self.max_cycles);
        kv.set("quad_rel_tol", self.quadrature.rel_tol);
        kv.set("quad_max_subdivisions", self.quadrature.max_subdivisions);
        kv
    }
}

/// Mean accumulated-voltage increment of one P/E cycle when every level is
/// written equally often: `(1/L)·Σ(x_i − x_1)`.
pub fn expected_cycle_increment(levels: &[f64]) -> Result<f64> {
    if levels.is_empty() {
        return Err(Error::InvalidParams("no levels".into()));
    }
    if levels.iter().any(|v| !v.is_finite()) || levels.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParams(format!("levels must be nondecreasing, got {levels:?}")));
    }
    let erased = levels[0];
    Ok(levels.iter().map(|x| x - erased).sum::<f64>() / levels.len() as f64)
}

pub(crate) fn capacity_raw(
    v_acc: f64,
    alpha: f64,
    t: f64,
    params: &DeviceParams,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let specs = channel_specs(v_acc, alpha, t, params)?;
    Ok(mutual_information(&specs, cfg)?.value)
}

/// Instantaneous storage capacity (bits) of a population in `state` whose
/// data must survive `t` hours.
pub fn capacity_at(state: &WearState, t: f64, params: &DeviceParams, cfg: &QuadratureConfig) -> Result<f64> {
    state.validate()?;
    capacity_raw(state.v_acc, state.alpha, t, params, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaClamp {
    /// Even full-scale levels miss the target.
    AtMaximum,
    /// The smallest allowed scale already exceeds the target.
    AtMinimum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaSolution {
    pub alpha: f64,
    /// Capacity at the returned α, bits.
    pub capacity: f64,
    pub clamped: Option<AlphaClamp>,
}

/// Smallest α the layout admits: with an unscaled erased level the
/// programmed levels must stay above it.
fn alpha_floor(params: &DeviceParams, alpha_min: f64) -> f64 {
    if params.scale_erased {
        alpha_min
    } else {
        let floor = params.base_levels[0] / params.base_levels[1];
        alpha_min.max(floor * (1.0 + 1e-9))
    }
}

/// Bisection for the smallest α in `[alpha_min, 1]` whose capacity reaches
/// `target_mi` at accumulated voltage `state.v_acc` (the current α of
/// `state` is ignored). The returned α is the upper end of the final
/// bracket, so its capacity is never below the target unless clamped.
pub fn find_alpha(
    state: &WearState,
    t: f64,
    target_mi: f64,
    params: &DeviceParams,
    cfg: &PolicyConfig,
) -> Result<AlphaSolution> {
    state.validate()?;
    solve_alpha(state.v_acc, t, target_mi, params, cfg)
}

fn solve_alpha(v_acc: f64, t: f64, target: f64, params: &DeviceParams, cfg: &PolicyConfig) -> Result<AlphaSolution> {
    let q = &cfg.quadrature;
    let cap = |a: f64| capacity_raw(v_acc, a, t, params, q);
    let top = cap(1.0)?;
    if top < target {
        return Ok(AlphaSolution { alpha: 1.0, capacity: top, clamped: Some(AlphaClamp::AtMaximum) });
    }
    let mut lo = alpha_floor(params, cfg.alpha_min);
    let bottom = cap(lo)?;
    if bottom >= target {
        return Ok(AlphaSolution { alpha: lo, capacity: bottom, clamped: Some(AlphaClamp::AtMinimum) });
    }
    let (mut hi, mut hi_cap) = (1.0, top);
    while hi - lo > cfg.alpha_tol {
        let mid = 0.5 * (lo + hi);
        let c = cap(mid)?;
        if c >= target {
            hi = mid;
            hi_cap = c;
        } else {
            lo = mid;
        }
    }
    Ok(AlphaSolution { alpha: hi, capacity: hi_cap, clamped: None })
}

/// State of the simulated device at the end of an adjustment period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub cycle: u64,
    /// Scale factor in force for data written from this cycle on.
    pub alpha: f64,
    /// Capacity of that data at the retention horizon, bits.
    pub capacity_bits: f64,
    pub v_acc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    CapacityThreshold,
    MaxCycles,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LifetimeResult {
    pub mode: PolicyMode,
    /// Last checkpoint cycle before the first one below the threshold.
    pub lifetime_cycles: u64,
    /// Scale factor used for the very first writes.
    pub initial_alpha: f64,
    pub checkpoints: Vec<Checkpoint>,
    pub terminated_by: Termination,
}

impl LifetimeResult {
    pub const CSV_HEADER: &'static str = "cycle,alpha,capacity_bits,v_acc";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for c in &self.checkpoints {
            out.push_str(&format!("{},{},{},{}\n", c.cycle, c.alpha, c.capacity_bits, c.v_acc));
        }
        out
    }
}

/// Runs the allocation policy from a fresh device. Every `adjust_period`
/// cycles the accumulated voltage grows by the expected per-cycle increment
/// of the levels in force, α is re-solved at the new wear (dynamic mode),
/// and the capacity of data written with that α is recorded. With
/// `stop_at_threshold` the run ends at the first checkpoint below the
/// threshold; otherwise it continues to `max_cycles`.
pub fn run_policy(params: &DeviceParams, cfg: &PolicyConfig, stop_at_threshold: bool) -> Result<LifetimeResult> {
    params.validate()?;
    cfg.validate()?;
    let t = cfg.retention_time;
    let choose = |v_acc: f64| -> Result<(f64, f64)> {
        match cfg.mode {
            PolicyMode::Fixed => Ok((1.0, capacity_raw(v_acc, 1.0, t, params, &cfg.quadrature)?)),
            PolicyMode::Dynamic => {
                let s = solve_alpha(v_acc, t, cfg.target_mi, params, cfg)?;
                Ok((s.alpha, s.capacity))
            }
        }
    };
    let (initial_alpha, _) = choose(0.0)?;
    let mut alpha = initial_alpha;
    let mut v_acc = 0.0;
    let mut cycles = 0u64;
    let mut checkpoints = Vec::new();
    let mut failed_at: Option<usize> = None;
    while cycles + cfg.adjust_period <= cfg.max_cycles {
        let levels = params.scaled_levels(alpha);
        check_increasing(&levels)?;
        v_acc += cfg.adjust_period as f64 * expected_cycle_increment(&levels)?;
        cycles += cfg.adjust_period;
        let (next_alpha, capacity) = choose(v_acc)?;
        alpha = next_alpha;
        checkpoints.push(Checkpoint { cycle: cycles, alpha, capacity_bits: capacity, v_acc });
        if capacity < cfg.capacity_threshold && failed_at.is_none() {
            failed_at = Some(checkpoints.len() - 1);
            if stop_at_threshold {
                break;
            }
        }
    }
    let (lifetime_cycles, terminated_by) = match failed_at {
        Some(0) => (0, Termination::CapacityThreshold),
        Some(i) => (checkpoints[i - 1].cycle, Termination::CapacityThreshold),
        None => (checkpoints.last().map_or(0, |c| c.cycle), Termination::MaxCycles),
    };
    Ok(LifetimeResult { mode: cfg.mode, lifetime_cycles, initial_alpha, checkpoints, terminated_by })
}

/// Runs the policy until the capacity first drops below the threshold.
pub fn simulate_lifetime(params: &DeviceParams, cfg: &PolicyConfig) -> Result<LifetimeResult> {
    run_policy(params, cfg, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_increment_examples() {
        let levels = [2.8, 5.2, 6.4, 7.86];
        assert!((expected_cycle_increment(&levels).unwrap() - 2.765).abs() < 1e-12);
        assert_eq!(expected_cycle_increment(&[3.0; 4]).unwrap(), 0.0);
        let scaled: Vec<f64> = levels.iter().map(|x| 0.4 * x).collect();
        assert!((expected_cycle_increment(&scaled).unwrap() - 0.4 * 2.765).abs() < 1e-12);
        assert!(expected_cycle_increment(&[2.0, 1.0]).is_err());
    }

    #[test]
    fn mode_parses() {
        assert_eq!("fixed".parse::<PolicyMode>().unwrap(), PolicyMode::Fixed);
        assert!("other".parse::<PolicyMode>().is_err());
    }

    #[test]
    fn config_round_trip() {
        let c = PolicyConfig { mode: PolicyMode::Fixed, max_cycles: 1234, ..Default::default() };
        let back = PolicyConfig::from_config(&c.to_config()).unwrap();
        assert_eq!(c, back);
    }

    #[test]
    fn config_rejects_bad_values() {
        let kv = KeyValues::parse("alpha_min = 1.5").unwrap();
        assert!(PolicyConfig::from_config(&kv).is_err());
        let kv = KeyValues::parse("adjust_period = 0").unwrap();
        assert!(PolicyConfig::from_config(&kv).is_err());
    }

    #[test]
    fn clamps_at_both_ends() {
        let p = DeviceParams::default();
        let cfg = PolicyConfig::default();
        let fresh = WearState::fresh(1.0).unwrap();
        let high = find_alpha(&fresh, 8760.0, 2.5, &p, &cfg).unwrap();
        assert_eq!((high.alpha, high.clamped), (1.0, Some(AlphaClamp::AtMaximum)));
        let low = find_alpha(&fresh, 8760.0, 0.0, &p, &cfg).unwrap();
        assert_eq!((low.alpha, low.clamped), (cfg.alpha_min, Some(AlphaClamp::AtMinimum)));
    }

    #[test]
    fn unscaled_erased_level_keeps_levels_ordered() {
        let p = DeviceParams { scale_erased: false, ..Default::default() };
        let cfg = PolicyConfig::default();
        let s = find_alpha(&WearState::fresh(1.0).unwrap(), 8760.0, 0.0, &p, &cfg).unwrap();
        assert!(s.alpha > 2.8 / 5.2);
        check_increasing(&p.scaled_levels(s.alpha)).unwrap();
    }

    #[test]
    fn zero_cycle_budget_gives_empty_trajectory() {
        let cfg = PolicyConfig { max_cycles: 0, ..Default::default() };
        let r = run_policy(&DeviceParams::default(), &cfg, false).unwrap();
        assert!(r.checkpoints.is_empty());
        assert_eq!(r.lifetime_cycles, 0);
        assert_eq!(r.terminated_by, Termination::MaxCycles);
        assert_eq!(r.to_csv(), "cycle,alpha,capacity_bits,v_acc\n");
    }
}

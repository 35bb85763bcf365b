use crate::config::KeyValues;
use crate::error::{Error, Result};

/// Technology constants of the read-channel model together with the level
/// layout of the cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceParams {
    /// Wear-out coefficient of the Laplace scale.
    pub a_w: f64,
    /// Wear-out floor of the Laplace scale, volts.
    pub c_w: f64,
    pub k1: f64,
    /// Retention coefficients multiplying `(V_acc/V_max)^k1` and `^k2`.
    pub a_r: f64,
    pub b_r: f64,
    pub k2: f64,
    /// Normalization voltage for `V_acc`, volts.
    pub v_max: f64,
    /// Retention time constant, hours.
    pub t0: f64,
    /// Programming-noise std of programmed levels, volts.
    pub sigma_p: f64,
    /// Programming-noise std of the erased level, volts.
    pub sigma_e: f64,
    /// Unscaled level voltages, lowest (erased) first.
    pub base_levels: Vec<f64>,
    /// Whether the scale factor also moves the erased level.
    pub scale_erased: bool,
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self {
            a_w: 1.8e-4,
            c_w: 1.26e-3,
            k1: 0.62,
            a_r: 7.0e-4,
            b_r: 4.76e-3,
            k2: 0.3,
            v_max: 16.0,
            t0: 1.0,
            sigma_p: 0.05,
            sigma_e: 0.35,
            base_levels: vec![2.8, 5.2, 6.4, 7.86],
            scale_erased: true,
        }
    }
}

pub(crate) const DEVICE_KEYS: &[&str] = &[
    "a_w",
    "c_w",
    "k1",
    "a_r",
    "b_r",
    "k2",
    "v_max",
    "t0",
    "sigma_p",
    "sigma_e",
    "num_levels",
    "base_levels",
    "scale_erased",
];

impl DeviceParams {
    pub fn num_levels(&self) -> usize {
        self.base_levels.len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        let finite =
            [self.a_w, self.c_w, self.k1, self.a_r, self.b_r, self.k2, self.v_max, self.t0, self.sigma_p, self.sigma_e];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("all device constants must be finite".into());
        }
        if !(self.sigma_e > self.sigma_p && self.sigma_p > 0.0) {
            return bad(format!("need sigma_e > sigma_p > 0, got sigma_e={} sigma_p={}", self.sigma_e, self.sigma_p));
        }
        if !(self.v_max > 0.0 && self.t0 > 0.0) {
            return bad("v_max and t0 must be positive".into());
        }
        if self.a_w < 0.0 || self.a_r < 0.0 || self.b_r < 0.0 {
            return bad("wear and retention coefficients must be nonnegative".into());
        }
        if !(self.c_w > 0.0) {
            return bad("c_w must be positive so the Laplace scale never vanishes".into());
        }
        if !(0.0 < self.k2 && self.k2 <= self.k1 && self.k1 <= 1.0) {
            return bad(format!("need 0 < k2 <= k1 <= 1, got k1={} k2={}", self.k1, self.k2));
        }
        if self.base_levels.len() < 2 {
            return bad("at least two levels are required".into());
        }
        check_increasing(&self.base_levels)?;
        if !(self.base_levels[0] >= 0.0) {
            return bad("level voltages must be nonnegative".into());
        }
        Ok(())
    }

    /// Level voltages after applying the scale factor.
    pub fn scaled_levels(&self, alpha: f64) -> Vec<f64> {
        self.base_levels
            .iter()
            .enumerate()
            .map(|(i, &x)| if i == 0 && !self.scale_erased { x } else { alpha * x })
            .collect()
    }

    pub fn from_config(kv: &KeyValues) -> Result<Self> {
        let mut p = Self::default();
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = kv.get::<f64>(stringify!($field))? { p.$field = v; }
            )*};
        }
        take!(a_w, c_w, k1, a_r, b_r, k2, v_max, t0, sigma_p, sigma_e);
        if let Some(levels) = kv.get_list::<f64>("base_levels")? {
            p.base_levels = levels;
        }
        if let Some(flag) = kv.get::<bool>("scale_erased")? {
            p.scale_erased = flag;
        }
        if let Some(n) = kv.get::<usize>("num_levels")? {
            if n != p.base_levels.len() {
                return Err(Error::Config {
                    key: "num_levels".into(),
                    msg: format!("{n} does not match {} base_levels", p.base_levels.len()),
                });
            }
        }
        p.validate().map_err(|e| Error::Config { key: "device".into(), msg: e.to_string() })?;
        Ok(p)
    }

    pub fn to_config(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.set("a_w", self.a_w);
        kv.set("c_w", self.c_w);
        kv.set("k1", self.k1);
        kv.set("a_r", self.a_r);
        kv.set("b_r", self.b_r);
        kv.set("k2", self.k2);
        kv.set("v_max", self.v_max);
        kv.set("t0", self.t0);
        kv.set("sigma_p", self.sigma_p);
        kv.set("sigma_e", self.sigma_e);
        kv.set("num_levels", self.num_levels());
        let levels: Vec<String> = self.base_levels.iter().map(f64::to_string).collect();
        kv.set("base_levels", levels.join(" "));
        kv.set("scale_erased", self.scale_erased);
        kv
    }
}

pub(crate) fn check_increasing(levels: &[f64]) -> Result<()> {
    if levels.iter().any(|v| !v.is_finite()) || levels.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParams(format!("levels must be strictly increasing, got {levels:?}")));
    }
    Ok(())
}

/// Accumulated wear of a cell population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WearState {
    /// Accumulated programmed-minus-erased voltage, volts.
    pub v_acc: f64,
    pub cycles: u64,
    /// Scale factor currently applied to the levels.
    pub alpha: f64,
}

impl WearState {
    pub fn new(v_acc: f64, cycles: u64, alpha: f64) -> Result<Self> {
        let s = Self { v_acc, cycles, alpha };
        s.validate()?;
        Ok(s)
    }

    /// A device that has never been cycled.
    pub fn fresh(alpha: f64) -> Result<Self> {
        Self::new(0.0, 0, alpha)
    }

    /// A state known only through its accumulated voltage; the cycle count is
    /// the number of full-scale cycles that would have produced it.
    pub fn from_accumulated(v_acc: f64, alpha: f64, params: &DeviceParams) -> Result<Self> {
        if !(v_acc >= 0.0) || !v_acc.is_finite() {
            return Err(Error::Domain(format!("accumulated voltage {v_acc} must be >= 0")));
        }
        let cycles = if v_acc == 0.0 {
            0
        } else {
            let per_cycle = crate::allocation::expected_cycle_increment(&params.base_levels)?;
            if per_cycle > 0.0 {
                ((v_acc / per_cycle).ceil() as u64).max(1)
            } else {
                1
            }
        };
        Self::new(v_acc, cycles, alpha)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_acc >= 0.0) || !self.v_acc.is_finite() {
            return Err(Error::Domain(format!("accumulated voltage {} must be >= 0", self.v_acc)));
        }
        if (self.v_acc == 0.0) != (self.cycles == 0) {
            return Err(Error::InvalidParams(format!(
                "v_acc = 0 exactly when cycles = 0 (v_acc={}, cycles={})",
                self.v_acc, self.cycles
            )));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Domain(format!("scale factor {} outside (0, 1]", self.alpha)));
        }
        Ok(())
    }
}

/// Effective read-channel parameters of one level: the read voltage is
/// `mu + N(0, sigma2) + Laplace(0, lambda)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub mu: f64,
    pub sigma2: f64,
    pub lambda: f64,
}

impl NoiseSpec {
    pub fn new(mu: f64, sigma2: f64, lambda: f64) -> Result<Self> {
        let s = Self { mu, sigma2, lambda };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite()
            || !(self.sigma2 > 0.0)
            || !(self.lambda > 0.0)
            || !self.sigma2.is_finite()
            || !self.lambda.is_finite()
        {
            return Err(Error::InvalidParams(format!(
                "noise spec needs finite mu, sigma2 > 0, lambda > 0, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }

    /// The same channel with its mean moved by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        Self { mu: self.mu + delta, ..*self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        DeviceParams::default().validate().unwrap();
    }

    #[test]
    fn invariants_enforced() {
        let mut p = DeviceParams::default();
        p.sigma_e = 0.01;
        assert!(p.validate().is_err());
        let mut p = DeviceParams::default();
        p.base_levels = vec![1.0, 1.0];
        assert!(p.validate().is_err());
        let mut p = DeviceParams::default();
        p.k2 = 0.9;
        assert!(p.validate().is_err());
    }

    #[test]
    fn config_round_trip() {
        let p = DeviceParams { scale_erased: false, ..Default::default() };
        let text = p.to_config().to_text();
        let back = DeviceParams::from_config(&KeyValues::parse(&text).unwrap()).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn num_levels_must_match() {
        let kv = KeyValues::parse("num_levels = 3").unwrap();
        assert!(matches!(DeviceParams::from_config(&kv), Err(Error::Config { .. })));
    }

    #[test]
    fn wear_state_zero_iff_uncycled() {
        assert!(WearState::new(0.0, 5, 1.0).is_err());
        assert!(WearState::new(3.0, 0, 1.0).is_err());
        assert!(WearState::new(3.0, 1, 0.0).is_err());
        let s = WearState::from_accumulated(8295.0, 1.0, &DeviceParams::default()).unwrap();
        assert_eq!(s.cycles, 3000);
    }

    #[test]
    fn scaled_levels_respect_erased_switch() {
        let mut p = DeviceParams::default();
        assert_eq!(p.scaled_levels(0.5)[0], 1.4);
        p.scale_erased = false;
        assert_eq!(p.scaled_levels(0.5), vec![2.8, 2.6, 3.2, 3.93]);
    }
}

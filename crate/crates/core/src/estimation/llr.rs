use super::fit::{bin_probabilities_raw, WearEstimate};
use super::histogram::ReadThresholds;
use crate::channel::DeviceParams;
use crate::error::{Error, Result};

/// Two-bit labels of the levels, lowest level first; the first (most
/// significant) bit is bit 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling(Vec<u8>);

impl Labeling {
    /// Gray mapping 11, 10, 00, 01 from the erased level upwards.
    pub fn gray4() -> Self {
        Self(vec![0b11, 0b10, 0b00, 0b01])
    }

    pub fn new(labels: Vec<u8>) -> Result<Self> {
        if labels.iter().any(|&l| l > 0b11) {
            return Err(Error::InvalidParams(format!("labels must be 2-bit, got {labels:?}")));
        }
        Ok(Self(labels))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Value of bit `bit` (0 = most significant) of level `level`.
    pub fn bit(&self, level: usize, bit: usize) -> u8 {
        (self.0[level] >> (1 - bit)) & 1
    }
}

const PROB_FLOOR: f64 = 1e-300;

/// Per-bin LLRs `ln P(bin | bit = 0) / P(bin | bit = 1)` for both bits,
/// using the bin probabilities at the estimated state. Rows are bins.
pub fn bin_llrs(
    est: &WearEstimate,
    params: &DeviceParams,
    alpha: f64,
    thresholds: &ReadThresholds,
    labeling: &Labeling,
) -> Result<Vec<[f64; 2]>> {
    llrs_at(est.v_acc_hat, est.t_hat, params, alpha, thresholds, labeling)
}

/// As [`bin_llrs`] at an explicit accumulated voltage and retention time.
pub fn llrs_at(
    v_acc: f64,
    t: f64,
    params: &DeviceParams,
    alpha: f64,
    thresholds: &ReadThresholds,
    labeling: &Labeling,
) -> Result<Vec<[f64; 2]>> {
    if labeling.len() != params.num_levels() {
        return Err(Error::InvalidParams(format!("{} labels for {} levels", labeling.len(), params.num_levels())));
    }
    let probs = bin_probabilities_raw(v_acc, alpha, t, params, thresholds)?;
    Ok((0..thresholds.num_bins())
        .map(|b| {
            let mut row = [0.0; 2];
            for (bit, llr) in row.iter_mut().enumerate() {
                let (mut zero, mut one) = (0.0, 0.0);
                for (level, p) in probs.iter().enumerate() {
                    if labeling.bit(level, bit) == 0 {
                        zero += p[b];
                    } else {
                        one += p[b];
                    }
                }
                *llr = zero.max(PROB_FLOOR).ln() - one.max(PROB_FLOOR).ln();
            }
            row
        })
        .collect())
}

pub fn llr_csv(llrs: &[[f64; 2]]) -> String {
    let mut out = String::from("bin_index,llr_bit0,llr_bit1\n");
    for (i, r) in llrs.iter().enumerate() {
        out.push_str(&format!("{i},{},{}\n", r[0], r[1]));
    }
    out
}

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{check_increasing, draw_read, level_noise_specs, DeviceParams, WearState};
use crate::error::{Error, Result};

/// Word-line voltages of the sensing passes. `k` thresholds split the
/// voltage axis into `k + 1` bins `(−∞, t₁], (t₁, t₂], …, (t_k, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadThresholds(Vec<f64>);

impl ReadThresholds {
    pub fn new(thresholds: Vec<f64>) -> Result<Self> {
        if thresholds.is_empty() {
            return Err(Error::InvalidParams("at least one read threshold is required".into()));
        }
        check_increasing(&thresholds)?;
        Ok(Self(thresholds))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn num_bins(&self) -> usize {
        self.0.len() + 1
    }

    pub fn bin_of(&self, y: f64) -> usize {
        self.0.partition_point(|&t| t < y)
    }

    /// Lower and upper edge of `bin`, infinite for the outer bins.
    pub fn bin_edges(&self, bin: usize) -> (f64, f64) {
        let lo = if bin == 0 { f64::NEG_INFINITY } else { self.0[bin - 1] };
        let hi = self.0.get(bin).copied().unwrap_or(f64::INFINITY);
        (lo, hi)
    }
}

/// `per_gap` thresholds centred on the midpoint of every pair of adjacent
/// levels, spaced `gap / (2·per_gap)` apart. For three per gap that is the
/// midpoint and the midpoint ± gap/6; for one it is the hard-decision
/// midpoint.
pub fn default_read_thresholds(levels: &[f64], per_gap: usize) -> Result<ReadThresholds> {
    if per_gap < 1 {
        return Err(Error::InvalidParams("per_gap must be >= 1".into()));
    }
    if levels.len() < 2 {
        return Err(Error::InvalidParams("need at least two levels".into()));
    }
    check_increasing(levels)?;
    let mut out = Vec::with_capacity((levels.len() - 1) * per_gap);
    for w in levels.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let step = (w[1] - w[0]) / (2 * per_gap) as f64;
        let centre = (per_gap as f64 - 1.0) / 2.0;
        out.extend((0..per_gap).map(|j| mid + (j as f64 - centre) * step));
    }
    ReadThresholds::new(out)
}

/// Index of the bin sitting on each level when thresholds come from
/// [`default_read_thresholds`].
pub fn level_central_bins(num_levels: usize, per_gap: usize) -> Vec<usize> {
    (0..num_levels).map(|i| i * per_gap).collect()
}

/// Per-bin read counts of a cell population.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub thresholds: ReadThresholds,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl Histogram {
    pub fn new(thresholds: ReadThresholds, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != thresholds.num_bins() {
            return Err(Error::InvalidParams(format!("{} counts for {} bins", counts.len(), thresholds.num_bins())));
        }
        let total = counts.iter().sum();
        Ok(Self { thresholds, counts, total })
    }

    /// Two-line text form: `thresholds: v1 … vk` then `counts: c0 … ck`.
    pub fn to_text(&self) -> String {
        let mut s = String::from("thresholds:");
        for t in self.thresholds.as_slice() {
            let _ = write!(s, " {t}");
        }
        s.push_str("\ncounts:");
        for c in &self.counts {
            let _ = write!(s, " {c}");
        }
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let field = |item: Option<(usize, &str)>, name: &str| -> Result<(usize, Vec<String>)> {
            let (no, line) = item.ok_or_else(|| Error::Parse { line: 0, msg: format!("missing `{name}:` line") })?;
            let rest = line
                .strip_prefix(name)
                .and_then(|r| r.strip_prefix(':'))
                .ok_or_else(|| Error::Parse { line: no, msg: format!("expected `{name}:`") })?;
            Ok((no, rest.split_whitespace().map(str::to_string).collect()))
        };
        let (t_line, t_items) = field(lines.next(), "thresholds")?;
        let (c_line, c_items) = field(lines.next(), "counts")?;
        if let Some((no, _)) = lines.next() {
            return Err(Error::Parse { line: no, msg: "unexpected trailing content".into() });
        }
        let thresholds = t_items
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| Error::Parse { line: t_line, msg: format!("`{s}`: {e}") }))
            .collect::<Result<Vec<_>>>()?;
        let counts = c_items
            .iter()
            .map(|s| s.parse::<u64>().map_err(|e| Error::Parse { line: c_line, msg: format!("`{s}`: {e}") }))
            .collect::<Result<Vec<_>>>()?;
        let thresholds =
            ReadThresholds::new(thresholds).map_err(|e| Error::Parse { line: t_line, msg: e.to_string() })?;
        Histogram::new(thresholds, counts).map_err(|e| Error::Parse { line: c_line, msg: e.to_string() })
    }
}

/// Counts `samples` into the bins of `thresholds`.
pub fn build_histogram(samples: &[f64], thresholds: &ReadThresholds) -> Histogram {
    let mut counts = vec![0u64; thresholds.num_bins()];
    for &y in samples {
        counts[thresholds.bin_of(y)] += 1;
    }
    Histogram { thresholds: thresholds.clone(), total: samples.len() as u64, counts }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellRead {
    pub level: usize,
    pub voltage: f64,
}

const CELLS_PER_STREAM: usize = 4096;

/// Writes `n_cells` cells with uniformly drawn levels and reads each back
/// once. Cells are generated in fixed-size blocks, each from its own RNG
/// stream of `seed`.
pub fn simulate_population(
    n_cells: usize,
    state: &WearState,
    t: f64,
    params: &DeviceParams,
    seed: u64,
) -> Result<Vec<CellRead>> {
    if n_cells < 1 {
        return Err(Error::InvalidParams("population needs at least one cell".into()));
    }
    let specs = level_noise_specs(state, t, params)?;
    let blocks = n_cells.div_ceil(CELLS_PER_STREAM);
    let cells = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let count = CELLS_PER_STREAM.min(n_cells - k * CELLS_PER_STREAM);
            let specs = &specs;
            (0..count)
                .map(move |_| {
                    let level = rng.random_range(0..specs.len());
                    CellRead { level, voltage: draw_read(&specs[level], &mut rng) }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(cells)
}

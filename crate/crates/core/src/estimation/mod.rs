//! Wear assessment from multi-read histograms: bin a simulated or measured
//! population, fit the physical wear state by multinomial maximum
//! likelihood, detect retention drift, and assign soft information to bins.

mod fit;
mod histogram;
mod llr;
mod shift;

pub use fit::{bin_probabilities, fit_wear_state, histogram_log_likelihood, FitConfig, WearEstimate, MIN_FIT_TOTAL};
pub use histogram::{
    build_histogram, default_read_thresholds, level_central_bins, simulate_population, CellRead, Histogram,
    ReadThresholds,
};
pub use llr::{bin_llrs, llr_csv, llrs_at, Labeling};
pub use shift::mean_shift;

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use flashcap::estimation::{
    bin_llrs, build_histogram, default_read_thresholds, fit_wear_state, llr_csv, mean_shift, simulate_population,
    FitConfig, Histogram, Labeling,
};
use flashcap::{known_config_keys, run_policy, DeviceParams, KeyValues, PolicyConfig, PolicyMode, WearState};

use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::{CliResult, Common};

struct Resolved {
    params: DeviceParams,
    policy: PolicyConfig,
    /// `mode` was given explicitly rather than defaulted.
    mode_set: bool,
}

impl Resolved {
    fn to_config(&self) -> KeyValues {
        let mut kv = self.params.to_config();
        kv.extend(&self.policy.to_config());
        kv
    }

    fn to_config_for_both(&self) -> KeyValues {
        let mut kv = self.to_config();
        kv.set("mode", "both");
        kv
    }
}

fn resolve(common: &Common) -> CliResult<Resolved> {
    let mut kv = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
            KeyValues::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
        }
        None => KeyValues::new(),
    };
    for o in &common.overrides {
        kv.apply_override(o).map_err(CliError::config)?;
    }
    kv.reject_unknown(&known_config_keys()).map_err(CliError::config)?;
    Ok(Resolved {
        params: DeviceParams::from_config(&kv).map_err(CliError::config)?,
        policy: PolicyConfig::from_config(&kv).map_err(CliError::config)?,
        mode_set: kv.raw("mode").is_some(),
    })
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}

fn emit_manifest(common: &Common, m: &RunManifest) -> CliResult<()> {
    match common.manifest_path().map(Path::to_path_buf).or_else(|| m.default_path()) {
        Some(path) => write(&path, &m.to_text()),
        None => {
            eprint!("{}", m.to_text());
            Ok(())
        }
    }
}

pub fn capacity_sweep(common: &Common, out: &Path) -> CliResult<()> {
    let r = resolve(common)?;
    let fixed = run_policy(&r.params, &PolicyConfig { mode: PolicyMode::Fixed, ..r.policy }, false)?;
    let dynamic = run_policy(&r.params, &PolicyConfig { mode: PolicyMode::Dynamic, ..r.policy }, false)?;
    let mut csv = String::from("cycle,capacity_fixed,capacity_dynamic,alpha_dynamic\n");
    for (f, d) in fixed.checkpoints.iter().zip(&dynamic.checkpoints) {
        debug_assert_eq!(f.cycle, d.cycle);
        csv.push_str(&format!("{},{},{},{}\n", f.cycle, f.capacity_bits, d.capacity_bits, d.alpha));
    }
    write(out, &csv)?;
    emit_manifest(
        common,
        &RunManifest {
            command: "capacity-sweep",
            config: r.to_config_for_both(),
            seed: None,
            outputs: vec![("csv", out.into())],
        },
    )
}

pub fn lifetime(common: &Common, out: Option<&Path>) -> CliResult<()> {
    let r = resolve(common)?;
    let modes = if r.mode_set { vec![r.policy.mode] } else { vec![PolicyMode::Fixed, PolicyMode::Dynamic] };
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| CliError::data(format!("cannot create {}: {e}", dir.display())))?;
    }
    let mut parts = Vec::new();
    let mut lifetimes = Vec::new();
    let mut outputs = Vec::new();
    for mode in modes {
        let res = run_policy(&r.params, &PolicyConfig { mode, ..r.policy }, true)?;
        parts.push(format!("lifetime_{mode}={}", res.lifetime_cycles));
        lifetimes.push(res.lifetime_cycles);
        if let Some(dir) = out {
            let path = dir.join(format!("lifetime_{mode}.csv"));
            write(&path, &res.to_csv())?;
            outputs.push((if mode == PolicyMode::Fixed { "fixed" } else { "dynamic" }, path));
        }
    }
    if let [fixed, dynamic] = lifetimes[..] {
        if fixed > 0 {
            parts.push(format!("improvement={:.1}%", 100.0 * (dynamic as f64 / fixed as f64 - 1.0)));
        } else {
            parts.push("improvement=n/a".into());
        }
    }
    println!("{}", parts.join(", "));
    let config = if r.mode_set { r.to_config() } else { r.to_config_for_both() };
    emit_manifest(common, &RunManifest { command: "lifetime", config, seed: None, outputs })
}

#[derive(Args)]
pub struct EstimateArgs {
    /// Histogram file (`thresholds: ...` / `counts: ...`).
    #[arg(long, conflicts_with = "simulate", required_unless_present = "simulate")]
    histogram: Option<PathBuf>,
    /// Simulate this many cells instead of reading a histogram.
    #[arg(long, value_name = "N_CELLS")]
    simulate: Option<usize>,
    /// Seed for the simulated population; required with --simulate.
    #[arg(long)]
    seed: Option<u64>,
    /// True accumulated voltage of the simulated population, volts.
    #[arg(long, default_value_t = 0.0)]
    v_acc: f64,
    /// Hours between write and read for the simulated population.
    #[arg(long, default_value_t = 0.0)]
    read_time: f64,
    /// Thresholds per level gap for the simulated population.
    #[arg(long, default_value_t = 3)]
    per_gap: usize,
    /// Scale factor the population was written with.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Retention time known to the fitter, hours; fitted jointly when absent.
    #[arg(long)]
    t_known: Option<f64>,
    /// Retention horizon for the reported capacity, hours; the configured retention_time by default.
    #[arg(long)]
    capacity_horizon: Option<f64>,
    /// Earlier histogram of the same population; reports the drift relative to it.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    llr_out: Option<PathBuf>,
    /// Save the histogram that was fitted.
    #[arg(long)]
    histogram_out: Option<PathBuf>,
}

fn read_histogram(path: &Path) -> CliResult<Histogram> {
    let text = fs::read_to_string(path).map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    Histogram::parse(&text).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

pub fn estimate(common: &Common, args: &EstimateArgs) -> CliResult<()> {
    let r = resolve(common)?;
    let mut config = r.to_config();
    let hist = match (&args.histogram, args.simulate) {
        (Some(path), _) => {
            config.set("estimate.histogram", path.display());
            read_histogram(path)?
        }
        (None, Some(n)) => {
            let seed = args.seed.ok_or_else(|| CliError::usage("--simulate needs --seed"))?;
            let state = WearState::from_accumulated(args.v_acc, args.alpha, &r.params)?;
            let thresholds = default_read_thresholds(&r.params.scaled_levels(args.alpha), args.per_gap)?;
            let reads: Vec<f64> =
                simulate_population(n, &state, args.read_time, &r.params, seed)?.iter().map(|c| c.voltage).collect();
            config.set("estimate.simulate", n);
            config.set("estimate.v_acc", args.v_acc);
            config.set("estimate.read_time", args.read_time);
            config.set("estimate.per_gap", args.per_gap);
            build_histogram(&reads, &thresholds)
        }
        (None, None) => return Err(CliError::usage("give --histogram or --simulate")),
    };
    let horizon = args.capacity_horizon.unwrap_or(r.policy.retention_time);
    config.set("estimate.alpha", args.alpha);
    config.set("estimate.capacity_horizon", horizon);
    if let Some(t) = args.t_known {
        config.set("estimate.t_known", t);
    }
    let fit_cfg = FitConfig { capacity_horizon: Some(horizon), quadrature: r.policy.quadrature, ..Default::default() };
    let est = fit_wear_state(&hist, &r.params, args.alpha, args.t_known, &fit_cfg)?;
    println!("v_acc_hat={}", est.v_acc_hat);
    println!("t_hat={}", est.t_hat);
    println!("capacity_hat={}", est.capacity_hat);
    println!("converged={}", est.converged);
    println!("log_likelihood={}", est.log_likelihood);
    if let Some(path) = &args.reference {
        config.set("estimate.reference", path.display());
        println!("mean_shift={}", mean_shift(&read_histogram(path)?, &hist)?);
    }
    let mut outputs = Vec::new();
    if let Some(path) = &args.llr_out {
        let llrs = bin_llrs(&est, &r.params, args.alpha, &hist.thresholds, &Labeling::gray4())?;
        write(path, &llr_csv(&llrs))?;
        outputs.push(("llr", path.clone()));
    }
    if let Some(path) = &args.histogram_out {
        write(path, &hist.to_text())?;
        outputs.push(("histogram", path.clone()));
    }
    emit_manifest(common, &RunManifest { command: "estimate", config, seed: args.seed, outputs })
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn flashcap(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flashcap")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn default_conf() -> String {
    format!("{}/../../params/default.conf", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn sweep_header_only_without_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let o = flashcap(&["capacity-sweep", "--set", "max_cycles=0", "--out", "s.csv"], dir.path());
    assert!(o.status.success());
    assert_eq!(
        fs::read_to_string(dir.path().join("s.csv")).unwrap(),
        "cycle,capacity_fixed,capacity_dynamic,alpha_dynamic\n"
    );
    let manifest = fs::read_to_string(dir.path().join("s.csv.manifest")).unwrap();
    assert!(manifest.starts_with("command = capacity-sweep\n"));
    assert!(manifest.contains("config.max_cycles = 0\n"));
}

#[test]
fn sweep_rows_follow_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let conf = default_conf();
    let o = flashcap(&["--config", &conf, "capacity-sweep", "--set", "max_cycles=3000", "--out", "s.csv"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let rows: Vec<Vec<f64>> = csv.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 30);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r[0], 100.0 * (i + 1) as f64);
        assert!(r[2] >= 1.92 - 1e-9 && r[3] > 0.0 && r[3] <= 1.0);
    }
    assert!(rows.last().unwrap()[1] < 1.9);
}

#[test]
fn lifetime_summary_and_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let o = flashcap(&["lifetime", "--out", "traj"], dir.path());
    assert!(o.status.success());
    let line = stdout(&o);
    assert!(
        line.starts_with("lifetime_fixed=") && line.contains(", lifetime_dynamic=") && line.contains("improvement=")
    );
    let improvement: f64 = line.trim().rsplit('=').next().unwrap().trim_end_matches('%').parse().unwrap();
    assert!(improvement >= 60.0, "{line}");
    let csv = fs::read_to_string(dir.path().join("traj/lifetime_dynamic.csv")).unwrap();
    assert!(csv.starts_with("cycle,alpha,capacity_bits,v_acc\n"));
}

#[test]
fn lifetime_single_mode() {
    let dir = tempfile::tempdir().unwrap();
    let o = flashcap(&["lifetime", "--set", "mode=fixed", "--manifest", "m.txt"], dir.path());
    assert!(o.status.success());
    let line = stdout(&o);
    assert!(line.starts_with("lifetime_fixed=") && !line.contains("dynamic"), "{line}");
    assert!(fs::read_to_string(dir.path().join("m.txt")).unwrap().contains("config.mode = fixed\n"));
}

#[test]
fn unattainable_threshold_is_zero_lifetime() {
    let dir = tempfile::tempdir().unwrap();
    let o = flashcap(&["lifetime", "--set", "capacity_threshold=2.1", "--set", "target_mi=2.2"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "lifetime_fixed=0, lifetime_dynamic=0, improvement=n/a");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = flashcap(&["lifetime", "--set", "no_such_key=1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no_such_key"));
    fs::write(dir.path().join("bad.conf"), "a_w = 1\nthis line is wrong\n").unwrap();
    let o = flashcap(&["--config", "bad.conf", "lifetime"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    let o = flashcap(&["estimate", "--simulate", "1000"], dir.path());
    assert_eq!(o.status.code(), Some(2), "seed is mandatory for simulation");
}

#[test]
fn estimate_round_trip_with_llrs() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "estimate",
        "--simulate",
        "9000",
        "--seed",
        "4",
        "--v-acc",
        "3000",
        "--alpha",
        "0.55",
        "--read-time",
        "8760",
        "--t-known",
        "8760",
        "--llr-out",
        "llr.csv",
        "--histogram-out",
        "h.txt",
    ];
    let o = flashcap(&args, dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = stdout(&o);
    let field =
        |k: &str| -> String { report.lines().find_map(|l| l.strip_prefix(&format!("{k}="))).unwrap().to_string() };
    let v: f64 = field("v_acc_hat").parse().unwrap();
    assert!((v - 3000.0).abs() <= 300.0, "{v}");
    assert_eq!(field("converged"), "true");
    let llr = fs::read_to_string(dir.path().join("llr.csv")).unwrap();
    let lines: Vec<&str> = llr.lines().collect();
    assert_eq!(lines[0], "bin_index,llr_bit0,llr_bit1");
    assert_eq!(lines.len() - 1, 3 * 3 + 1);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 3));

    // Refit from the saved histogram, reporting drift against itself.
    let o = flashcap(
        &[
            "estimate",
            "--histogram",
            "h.txt",
            "--alpha",
            "0.55",
            "--t-known",
            "8760",
            "--reference",
            "h.txt",
            "--manifest",
            "m",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains(&format!("v_acc_hat={v}\n")));
    assert!(stdout(&o).contains("mean_shift=0\n"));
}

#[test]
fn estimate_data_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.txt"), "thresholds: 1 2 3\ncounts: 2 3 4 1\n").unwrap();
    let o = flashcap(&["estimate", "--histogram", "small.txt"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("insufficient data"));
    fs::write(dir.path().join("bad.txt"), "thresholds: 1 2 3\ncounts: 2 3 four 1\n").unwrap();
    let o = flashcap(&["estimate", "--histogram", "bad.txt"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

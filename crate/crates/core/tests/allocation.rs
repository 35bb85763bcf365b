use flashcap::{
    capacity_at, find_alpha, run_policy, simulate_lifetime, DeviceParams, PolicyConfig, PolicyMode, QuadratureConfig,
    Termination, WearState,
};

fn dynamic() -> PolicyConfig {
    PolicyConfig::default()
}

fn fixed() -> PolicyConfig {
    PolicyConfig { mode: PolicyMode::Fixed, ..Default::default() }
}

#[test]
fn capacity_of_new_device() {
    let p = DeviceParams::default();
    let q = QuadratureConfig::default();
    let full = capacity_at(&WearState::fresh(1.0).unwrap(), 0.0, &p, &q).unwrap();
    assert!((full - 2.0).abs() < 1e-2, "{full}");
    let scaled = capacity_at(&WearState::fresh(0.28).unwrap(), 8760.0, &p, &q).unwrap();
    assert!((scaled - 1.92).abs() < 0.05, "{scaled}");
}

#[test]
fn initial_alpha() {
    let s = find_alpha(&WearState::fresh(1.0).unwrap(), 8760.0, 1.92, &DeviceParams::default(), &dynamic()).unwrap();
    assert!((s.alpha - 0.28).abs() <= 0.05, "{}", s.alpha);
    assert!(s.capacity >= 1.92 && s.clamped.is_none());
}

#[test]
fn trajectory_invariants() {
    let p = DeviceParams::default();
    let dyn_run = simulate_lifetime(&p, &dynamic()).unwrap();
    assert_eq!(dyn_run.terminated_by, Termination::CapacityThreshold);
    let cps = &dyn_run.checkpoints;
    let last = cps.last().unwrap();
    assert!(last.capacity_bits < 1.9);
    for w in cps.windows(2) {
        assert!(w[1].cycle > w[0].cycle && w[1].v_acc > w[0].v_acc);
        assert!(w[1].alpha >= w[0].alpha, "α decreased at cycle {}", w[1].cycle);
    }
    for c in &cps[..cps.len() - 1] {
        assert!(c.capacity_bits >= 1.9);
    }

    let fixed_run = run_policy(&p, &PolicyConfig { max_cycles: last.cycle, ..fixed() }, false).unwrap();
    for (d, f) in cps.iter().zip(&fixed_run.checkpoints) {
        assert_eq!(d.cycle, f.cycle);
        assert!(d.v_acc <= f.v_acc);
    }
    let fixed_life = simulate_lifetime(&p, &fixed()).unwrap().lifetime_cycles;
    assert!(dyn_run.lifetime_cycles >= fixed_life);
}

#[test]
fn policy_stable_under_coarser_adjustment() {
    let p = DeviceParams::default();
    let a = simulate_lifetime(&p, &dynamic()).unwrap().lifetime_cycles as f64;
    let b = simulate_lifetime(&p, &PolicyConfig { adjust_period: 200, ..dynamic() }).unwrap().lifetime_cycles as f64;
    assert!((a - b).abs() / a < 0.05, "{a} vs {b}");
}

#[test]
fn unattainable_threshold_gives_zero_lifetime() {
    let p = DeviceParams::default();
    for cfg in [fixed(), dynamic()] {
        let r = simulate_lifetime(&p, &PolicyConfig { capacity_threshold: 2.1, ..cfg }).unwrap();
        assert_eq!(r.lifetime_cycles, 0);
        assert_eq!(r.terminated_by, Termination::CapacityThreshold);
    }
}

#[test]
fn cycle_cap_is_flagged() {
    let r = simulate_lifetime(&DeviceParams::default(), &PolicyConfig { max_cycles: 1000, ..dynamic() }).unwrap();
    assert_eq!(r.terminated_by, Termination::MaxCycles);
    assert_eq!(r.lifetime_cycles, 1000);
    assert_eq!(r.checkpoints.len(), 10);
}

#[test]
fn lifetime_csv_header() {
    let r = simulate_lifetime(&DeviceParams::default(), &PolicyConfig { max_cycles: 300, ..fixed() }).unwrap();
    let csv = r.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("cycle,alpha,capacity_bits,v_acc"));
    assert_eq!(lines.count(), 3);
}

use qswitch::scenario::{
    compare_policies, execute, load_config, parse_config, presets, run_scenario, to_json,
    Overrides, COMPARISON_FILE, SUMMARY_FILE,
};
use qswitch::switching::PolicyKind;
use qswitch::Error;

#[test]
fn config_round_trips_through_a_file() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("cfg.json");
    std::fs::write(
        &path,
        r#"{"preset": "amplitude", "name": "tuned", "controller": {"xi": 2},
            "certificates": {"ftcs": {"window": "terminal"}}}"#,
    )
    .unwrap();
    let cfg = load_config(&path).unwrap();
    assert_eq!(cfg.name, "tuned");
    let again = parse_config(&to_json(&cfg)).unwrap();
    assert_eq!(cfg, again);
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(load_config("/nonexistent/cfg.json"), Err(Error::Io(_))));
}

#[test]
fn trajectory_rows_match_grid_and_events() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = presets::polarization();
    cfg.apply(&Overrides {
        t_final: Some(0.5),
        ..Overrides::default()
    });
    let report = run_scenario(&cfg, tmp.path()).unwrap();
    let traj = &report.outcome.trajectory;
    let n = (0.5_f64 / 1e-4).round() as usize;
    assert_eq!(traj.samples.len(), n + 1 + report.outcome.log.len());
    assert_eq!(report.summary.switches, report.outcome.log.len());
    let csv = std::fs::read_to_string(tmp.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), traj.samples.len() + 1);
}

#[test]
fn failed_runs_still_write_their_files() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = presets::dephasing();
    cfg.policy.terminal_vartheta = 1e-5;
    let (report, failure) = execute(&cfg, tmp.path()).unwrap();
    assert!(matches!(failure, Some(Error::AssumptionViolation { .. })));
    assert_eq!(report.summary.status, "assumption_violation");
    assert!(tmp.path().join(SUMMARY_FILE).exists());
    assert!(matches!(run_scenario(&cfg, tmp.path()), Err(Error::AssumptionViolation { .. })));
}

#[test]
fn policy_comparison_orders_final_lyapunov_values() {
    let tmp = tempfile::tempdir().unwrap();
    let rows = compare_policies(
        &presets::amplitude(),
        &[PolicyKind::None, PolicyKind::Fixed, PolicyKind::Shrink],
        tmp.path(),
    )
    .unwrap();
    let v = |k| rows.iter().find(|r| r.policy == k).unwrap().final_v;
    assert!(v(PolicyKind::Shrink) <= v(PolicyKind::Fixed));
    assert!(v(PolicyKind::Fixed) < v(PolicyKind::None));
    assert!(rows.iter().all(|r| r.status == "ok"));
    assert!(tmp.path().join(COMPARISON_FILE).exists());
}

#[test]
fn duplicated_policy_gives_identical_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = presets::dephasing();
    cfg.simulation.t_final = 0.3;
    let rows = compare_policies(&cfg, &[PolicyKind::Shrink, PolicyKind::Shrink], tmp.path()).unwrap();
    assert_eq!(rows[0].final_v.to_bits(), rows[1].final_v.to_bits());
    assert_eq!(rows[0].fidelity.to_bits(), rows[1].fidelity.to_bits());
    assert_eq!(rows[0].switches, rows[1].switches);
}

#[test]
fn dephasing_settles_near_the_target() {
    let out = presets::dephasing().build().unwrap().simulate().unwrap();
    assert!(out.summary.final_v <= 5e-4);
    assert!(out.summary.final_v >= 1e-4);
}

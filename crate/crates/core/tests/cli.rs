use std::fs;
use std::path::Path;

use kslab::harness::cli;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("kslab").chain(args.iter().copied());
    let code = cli(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
}

fn decay_config(dir: &Path, scenario: &str, kappa: f64, extra_solver: &str) -> String {
    let path = dir.join(format!("{scenario}.cfg"));
    let text = format!(
        "[params]\nd1 = 1\nd2 = 1\nchi = 1\nalpha = 1\nbeta = 1\nkappa = {kappa}\nmu = 1\n\n\
         [grid]\ncells = 16\n\n\
         [solver]\nt_end = 4\ndt_initial = 0.002\nsnapshot_stride = 50\n{extra_solver}\n\
         [ic]\nkind = constant-plus-perturbation\nu = 1\nv = 1\namplitude = 0\n\n\
         [scenario]\nname = {scenario}\noutput = {}\n",
        dir.join("out").display()
    );
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn thresholds_prints_unit_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = decay_config(dir.path(), "decay-zero-kappa", 0.0, "");
    let (code, out, _) = run(&["thresholds", "--config", &cfg]);
    assert_eq!(code, 0);
    let mu0: f64 = value(&out, "mu0").unwrap().parse().unwrap();
    assert!((mu0 - 7.743416).abs() < 1e-6);
    assert_eq!(value(&out, "kappa_regime"), Some("zero"));

    let (code, out, _) = run(&["thresholds", "--config", &cfg, "--convex"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "mu0").unwrap().parse::<f64>().unwrap(), 0.75);
}

#[test]
fn simulate_writes_report_csv_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = decay_config(dir.path(), "decay-zero-kappa", 0.0, "");
    let (code, out, err) = run(&["simulate", "--config", &cfg]);
    assert_eq!(code, 0, "{out}{err}");
    assert_eq!(value(&out, "exit_code"), Some("0"));
    let base = dir.path().join("out");
    let report = fs::read_to_string(base.join("report.txt")).unwrap();
    assert_eq!(value(&report, "outcome"), Some("completed"));
    assert!(base.join("diagnostics.csv").is_file());
    assert!(base.join("config.txt").is_file());
    let snapshots = fs::read_dir(base.join("snapshots")).unwrap().count();
    assert!(snapshots >= 4, "{snapshots}");

    let csv = base.join("diagnostics.csv");
    let (code, out, _) = run(&["fit", "--csv", csv.to_str().unwrap(), "--column", "Linf_u"]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "model"), Some("algebraic"));
    let rate: f64 = value(&out, "rate").unwrap().parse().unwrap();
    assert!((rate - 1.0).abs() < 0.1, "{rate}");
}

#[test]
fn scenario_constraint_violation_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = decay_config(dir.path(), "convergence-positive-kappa", -1.0, "");
    let (code, _, err) = run(&["simulate", "--config", &cfg]);
    assert_eq!(code, 3);
    assert!(err.contains("kappa"), "{err}");
}

#[test]
fn blowup_threshold_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = decay_config(
        dir.path(),
        "decay-zero-kappa",
        0.0,
        "blowup_linf_threshold = 0.5\n",
    );
    let (code, out, _) = run(&["simulate", "--config", &cfg]);
    assert_eq!(code, 2, "{out}");
    assert_eq!(value(&out, "outcome"), Some("blowup-detected"));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["simulate"]).0, 3);
    assert_eq!(run(&["simulate", "--config", "/nonexistent/x.cfg"]).0, 3);
    assert_eq!(run(&["frobnicate"]).0, 3);
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["--version"]).0, 0);
}

#[test]
fn fit_rejects_bad_windows_and_columns() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    let mut text = String::from("t,Linf_u\n");
    for i in 0..20 {
        let t = i as f64 * 0.5;
        text.push_str(&format!("{t},{}\n", (-0.3 * t).exp()));
    }
    fs::write(&csv, text).unwrap();
    let csv = csv.to_str().unwrap();
    let (code, out, _) = run(&[
        "fit", "--csv", csv, "--column", "Linf_u", "--window", "0,9.5",
    ]);
    assert_eq!(code, 0);
    assert_eq!(value(&out, "model"), Some("exponential"));
    let rate: f64 = value(&out, "rate").unwrap().parse().unwrap();
    assert!((rate - 0.3).abs() < 1e-9);
    assert_eq!(run(&["fit", "--csv", csv, "--column", "nope"]).0, 3);
    assert_eq!(
        run(&["fit", "--csv", csv, "--column", "Linf_u", "--window", "5,1"]).0,
        3
    );
}

#[test]
fn sweep_is_deterministic_and_rejects_empty_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = decay_config(dir.path(), "decay-zero-kappa", 0.0, "");
    let summary = dir.path().join("out").join("summary.csv");

    let (code, out, err) = run(&[
        "sweep", "--config", &cfg, "--axis", "mu", "--values", "1,2,4",
    ]);
    assert_eq!(code, 0, "{out}{err}");
    let first = fs::read(&summary).unwrap();
    let (code, _, _) = run(&[
        "sweep", "--config", &cfg, "--axis", "mu", "--values", "1,2,4",
    ]);
    assert_eq!(code, 0);
    assert_eq!(first, fs::read(&summary).unwrap());
    assert!(dir.path().join("out/point_002/diagnostics.csv").is_file());

    assert_eq!(
        run(&["sweep", "--config", &cfg, "--axis", "mu", "--values", ""]).0,
        3
    );
    assert_eq!(
        run(&["sweep", "--config", &cfg, "--axis", "nope", "--values", "1"]).0,
        3
    );
    assert_eq!(
        run(&["sweep", "--config", &cfg, "--axis", "d1", "--values", "-1"]).0,
        3
    );
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = decay_config(dir.path(), "decay-negative-kappa", -1.0, "");
    let bin = env!("CARGO_BIN_EXE_kslab");
    let status = std::process::Command::new(bin)
        .args(["simulate", "--config", &good])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
    let bad = decay_config(dir.path(), "decay-zero-kappa", -1.0, "");
    let status = std::process::Command::new(bin)
        .args(["simulate", "--config", &bad])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(3));
}

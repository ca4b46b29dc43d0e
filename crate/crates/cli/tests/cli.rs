use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use scar_core::armodel::simulate;
use scar_core::scar::ScarCertificate;
use scar_core::signals::save_timeseries;
use scar_core::{Complex64, Model};

fn scar(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scar")).args(args).current_dir(dir).env_remove("SCAR_BUDGET_SECS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn scar_prints_the_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = scar(&["scar", "--lambda=-8.312-8.569i", "--out", "cert", "--no-timestamp"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("dt_hat = 0.14"), "{text}");
    let cert = ScarCertificate::from_json(&fs::read_to_string(dir.path().join("cert/certificate.json")).unwrap()).unwrap();
    assert!(cert.created.is_none());
    let model = Model::from_json(&fs::read_to_string(dir.path().join("cert/model.json")).unwrap()).unwrap();
    assert!((model.dt() - cert.dt_hat / 2.0).abs() < 1e-12);
    assert!(model.is_stable().stable);
}

#[test]
fn certificates_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = scar(&["scar", "--lambda", "-1.246-1.214i", "--out", out, "--no-timestamp"], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let read = |d| fs::read(dir.path().join(d).join("certificate.json")).unwrap();
    assert_eq!(read("a"), read("b"));
}

#[test]
fn unstable_lambda_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = scar(&["scar", "--lambda", "0.5+1i"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unstable continuous dynamics"));
}

#[test]
fn step_beyond_bound_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = scar(&["scar", "--lambda=-1.246-1.214i", "--dt", "2.0"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn malformed_arguments_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["scar", "--lambda", "abc"][..], &["frobnicate"][..], &["fit"][..]] {
        assert_eq!(scar(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn bad_budget_variable_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_scar"))
        .args(["scar", "--lambda=-1-1i"])
        .current_dir(dir.path())
        .env("SCAR_BUDGET_SECS", "soon")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("SCAR_BUDGET_SECS"));
}

#[test]
fn zero_budget_still_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_scar"))
        .args(["scar", "--lambda=-1.246-1.214i", "--no-timestamp"])
        .current_dir(dir.path())
        .env("SCAR_BUDGET_SECS", "0")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("dt_hat = 1.00"));
}

#[test]
fn missing_file_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = scar(&["fit", "nope.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fit_then_filter_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let truth = Model::new(vec![Complex64::new(-0.1, 0.2), Complex64::new(0.05, -0.1)], 0.2, 0.1).unwrap();
    let series = simulate(&truth, 5000, 3).unwrap();
    save_timeseries(&series, &dir.path().join("series.csv")).unwrap();

    let o = scar(&["fit", "series.csv", "-p", "2", "--out", "m.json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("m.diagnostics.json").exists());
    let fitted = Model::from_json(&fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    for (a, b) in fitted.coeffs().iter().zip(truth.coeffs()) {
        assert!((a - b).norm() < 0.05, "{a} vs {b}");
    }

    let o = scar(&["fit", "series.csv", "--aic", "5", "--out", "aic.json"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));

    let o = scar(&["fit", "series.csv", "--method", "cyw", "-p", "3"], dir.path());
    assert_eq!(o.status.code(), Some(2), "constrained fit needs lambda");

    let o = scar(&["filter", "--model", "m.json", "--truth", "series.csv", "--n", "2", "--track", "track.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report["posterior_rmse"].as_f64().unwrap() < report["observation_error"].as_f64().unwrap());
    assert!(dir.path().join("track.csv").exists());
}

#[test]
fn sweep_writes_results_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("sweep.toml"),
        r#"
lambda = "-2-3i"
dts = [0.05, 0.1]
ns = [1, 5]
r_fractions = [0.5]
seeds = [1, 2]
truth_length = 3000
output_dir = "out"

[truth]
source = "ou"
lambda = [-2.0, -3.0]
sigma = 1.0
seed = 4

[[models]]
kind = "ar3"

[[models]]
kind = "scar3"

[[models]]
kind = "car_p"
p = 4
"#,
    )
    .unwrap();
    let o = scar(&["sweep", "sweep.toml"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let out = dir.path().join("out");
    let results = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(results.lines().count(), 1 + 3 * 2 * 2 * 2);
    assert!(results.starts_with("model_tag,dt,n,R_fraction,prior_rmse,posterior_rmse,diverged,seed"));
    assert!(out.join("certificate.json").exists() && out.join("summary.json").exists());
    assert!(fs::read_dir(out.join("tracks")).unwrap().count() > 0);
    assert!(stdout(&o).contains("SCAR-3"));
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "models = []\ndts = [0.1]\nns = [1]\nr_fractions = [1.0]\nseeds = [1]\nbogus = 1\n[truth]\nsource = \"ou\"\nlambda = [-1.0, 0.0]\nsigma = 1.0\n").unwrap();
    assert_eq!(scar(&["sweep", "bad.toml"], dir.path()).status.code(), Some(2));
}

#[test]
fn lorenz_writes_mode_statistics() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("l96.toml"),
        "modes = [1, 8]\nwrite_trajectory = false\n[system]\nduration = 50.0\nspin_up = 10.0\n",
    )
    .unwrap();
    let o = scar(&["lorenz", "l96.toml", "--out", "l96"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    for k in [1, 8] {
        for f in [format!("mode_{k}.csv"), format!("acf_mode_{k}.csv"), format!("stats_mode_{k}.json")] {
            assert!(dir.path().join("l96").join(&f).exists(), "{f}");
        }
    }
    assert!(!dir.path().join("l96/trajectory.csv").exists());
}

#[test]
fn forecast_runs_on_a_synthetic_record() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("fc.toml"),
        r#"
lambda = "-0.4458+3.7161i"
output_dir = "fc"

[data]
source = "synthetic"
lambda = "-0.4458+3.7161i"
sigma = 0.944
observation_noise = 0.02
length = 2500
seed = 3

[enkf]
ensemble_size = 20
train_len = 1500
max_lead = 10
"#,
    )
    .unwrap();
    let o = scar(&["forecast", "fc.toml"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let pc = fs::read_to_string(dir.path().join("fc/pattern_correlation.csv")).unwrap();
    assert_eq!(pc.lines().count(), 1 + 2 * 11);
    assert!(dir.path().join("fc/track_SCAR-3.csv").exists() && dir.path().join("fc/track_AR-3.csv").exists());
}

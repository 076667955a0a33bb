use std::process::{Command, Output};

use serde_json::Value;

fn hypspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypspec"))
        .args(args)
        .env_remove("SOURCE_DATE_EPOCH")
        .env("HYPSPEC_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn kernel_csv_matches_closed_form() {
    let out = hypspec(&["kernel", "--n", "2", "--what", "spectral", "--sigma", "1", "--r-grid", "1:1:lin:1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# hypspec"));
    assert_eq!(lines.next().unwrap(), "r,value_re,value_im");
    let cells: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    let exact = 1f64.sin() / (2.0 * std::f64::consts::PI.powi(2) * 1f64.sinh());
    assert!((cells[1] - exact).abs() < 1e-14, "{cells:?}");
    assert_eq!(cells[2], 0.0);
}

#[test]
fn json_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.json");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let out = hypspec(&["nontrap", "--samples", "12", "--seed", "5", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        runs.push(std::fs::read(&p).unwrap());
    }
    let a = &runs[0];
    assert_eq!(a, &runs[1]);
    let v: Value = serde_json::from_slice(a).unwrap();
    assert_eq!(v["timestamp"], 0);
    assert_eq!(v["results"]["seed"], 5);
    assert_eq!(v["results"]["trapped_count"], 0);
}

#[test]
fn source_date_epoch_sets_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("chi.json");
    let status = Command::new(env!("CARGO_BIN_EXE_hypspec"))
        .args(["chi", "--a", "0", "--x", "1", "--out", p.to_str().unwrap()])
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .status()
        .unwrap();
    assert!(status.success());
    let v: Value = serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap();
    assert_eq!(v["timestamp"], 1_700_000_000u64);
    assert_eq!(v["schema"], 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(hypspec(&["geodesic", "--start", "1,0,0,1"]).status.code(), Some(2));
    assert_eq!(hypspec(&["kernel", "--sigma", "1", "--bogus"]).status.code(), Some(2));
    assert_eq!(hypspec(&["kernel", "--sigma", "1", "--what", "nope"]).status.code(), Some(2));
    assert_eq!(hypspec(&["report", "--criterion", "99"]).status.code(), Some(2));
    assert_eq!(hypspec(&["--help"]).status.code(), Some(0));
}

#[test]
fn failed_checks_exit_one() {
    let out = hypspec(&["nontrap", "--samples", "4", "--tmax", "0.001"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["results"]["passed"], false);
}

#[test]
fn geodesic_csv_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("m.cfg");
    std::fs::write(&cfg, "metric.kind=hyperbolic\nmetric.n=1\nrun.seed=3\n").unwrap();
    let csv = dir.path().join("traj.csv");
    let out = hypspec(&[
        "--config", cfg.to_str().unwrap(),
        "geodesic", "--start", "1,0,0.6,0.8", "--t", "4", "--samples", "5", "--out", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("# hypspec") && text.contains("seed=3"));
    assert_eq!(text.lines().nth(1).unwrap(), "t,x,y1,lam,mu1,constraint_drift");
    assert_eq!(text.lines().count(), 7);
    for line in text.lines().skip(2) {
        let drift: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(drift < 1e-8);
    }
}

#[test]
fn restriction_json_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("r.svg");
    let out = hypspec(&["restriction", "--n", "2", "--sigma", "10:1000:log:12", "--svg", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["results"]["slope"].as_f64().unwrap() - 2.0).abs() < 0.05);
    assert_eq!(v["results"]["target_exponent"], 2.0);
    assert_eq!(std::fs::read_to_string(svg).unwrap().matches("<polyline").count(), 2);
}

#[test]
fn fgtail_reports_null_slope_for_short_lists() {
    let out = hypspec(&["fgtail", "--m", "1", "--R", "4,8,16,32,64"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["results"]["tails"].as_array().unwrap().len(), 5);
    assert!(v["results"]["fitted_slope"].is_null());
}

use std::process::Command;

fn mginf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mginf"))
}

fn json_of(out: std::process::Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn simulate_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let out = mginf()
        .env("MGINF_OUT_DIR", dir.path())
        .args(["simulate", "--dist", "family = \"exponential\", rate = 1.0"])
        .args(["--lambda", "2", "--delta", "0.25", "--n", "16384", "--seed", "9", "--out", "run"])
        .output()
        .unwrap();
    json_of(out);
    let events = std::fs::read_to_string(dir.path().join("run_events.csv")).unwrap();
    let header: serde_json::Value = serde_json::from_str(events.lines().next().unwrap()).unwrap();
    assert_eq!(header["seed"], 9);
    assert_eq!(header["rho"], 2.0);
    assert_eq!(events.lines().nth(1), Some("epoch,kind"));
    let samples = dir.path().join("run_samples.csv");
    assert_eq!(std::fs::read_to_string(&samples).unwrap().lines().count(), 16385);

    let est = json_of(
        mginf()
            .args(["estimate-g", "--samples", samples.to_str().unwrap()])
            .args(["--delta", "0.25", "--x0", "1", "--ell", "2", "--h", "0.75", "--lambda", "2"])
            .output()
            .unwrap(),
    );
    let g = est["estimate"].as_f64().unwrap();
    assert!((g - (1.0 - (-1f64).exp())).abs() < 0.2, "{g}");
    assert_eq!(est["window"], serde_json::json!([0.25, 1.75]));

    let lam = json_of(
        mginf()
            .args(["estimate-lambda", "--samples", samples.to_str().unwrap()])
            .args(["--delta", "0.25", "--ell", "2", "--h", "1"])
            .output()
            .unwrap(),
    );
    assert!((lam["estimate"].as_f64().unwrap() - 2.0).abs() < 0.6);
}

#[test]
fn estimate_requires_bandwidth_choice() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("x.csv");
    std::fs::write(&f, "x\n1\n2\n3\n").unwrap();
    let out = mginf()
        .args(["estimate-theta", "--samples", f.to_str().unwrap(), "--delta", "1", "--x0", "1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn risk_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lam.toml");
    std::fs::write(
        &cfg,
        r#"
target = "lambda_up"
replicates = 50
master_seed = 4
[source]
kind = "queue"
lambda = 1.0
dist = { family = "uniform", a = 0.0, b = 2.0 }
[estimator]
ell = 2
[[ladder]]
delta = 0.5
n = 200
[[ladder]]
delta = 0.5
n = 800
"#,
    )
    .unwrap();
    let report = json_of(
        mginf()
            .env("MGINF_OUT_DIR", dir.path())
            .args(["risk", "--config", cfg.to_str().unwrap()])
            .output()
            .unwrap(),
    );
    assert_eq!(report["rungs"].as_array().unwrap().len(), 2);
    let csv = std::fs::read_to_string(dir.path().join("lam.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,delta,h,rmse,se,bound"));
    assert!(dir.path().join("lam.json").exists());
}

#[test]
fn lower_bound_reports_pair() {
    let dir = tempfile::tempdir().unwrap();
    let v = json_of(
        mginf()
            .env("MGINF_OUT_DIR", dir.path())
            .args(["lower-bound", "--T", "256", "--c0", "0.05", "--c1", "0.0625", "--c3", "1", "--c21", "4"])
            .args(["--dump", "lb"])
            .output()
            .unwrap(),
    );
    let a = v["a"].as_f64().unwrap();
    let n = v["N"].as_f64().unwrap();
    assert!((a - 1.0 / (2.0 * std::f64::consts::PI * n)).abs() < 1e-15);
    assert!(v["KL"].as_f64().unwrap() >= 0.0);
    assert!(v["f1_min"].as_f64().unwrap() >= -1e-12);
    assert!(dir.path().join("lb_spectra.csv").exists());
    assert!(dir.path().join("lb_covariances.csv").exists());
}

#[test]
fn oracle_check_passes() {
    let v = json_of(mginf().args(["oracle-check", "--seed", "3"]).output().unwrap());
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["passed"] == true));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn braidmat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_braidmat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, value: &Value) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, value.to_string()).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn n2(mode: &str) -> Value {
    json!({
        "N": 2,
        "mode": mode,
        "parameters": [
            {"i": 1, "j": 1, "epsilon": "+", "value": 1.0},
            {"i": 1, "j": 1, "epsilon": "-", "value": -1.0}
        ]
    })
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_at_zero_is_identity() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "n2.json", &n2("real"));
    let out = dir.path().join("r.json");
    let res = braidmat(&[
        "build",
        "--config",
        s(&cfg),
        "--theta",
        "0",
        "--out",
        s(&out),
    ]);
    assert_eq!(res.status.code(), Some(0));
    let m = read_json(&out);
    assert_eq!(m["dim"], 4);
    let entries = m["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 16);
    for (k, e) in entries.iter().enumerate() {
        let want = if k % 5 == 0 { 1.0 } else { 0.0 };
        assert_eq!(e[0].as_f64().unwrap(), want);
        assert_eq!(e[1].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn odd_central_parameter_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "n3.json",
        &json!({"N": 3, "mode": "real", "parameters": [{"i": 2, "j": 2, "epsilon": "-", "value": 0.25}]}),
    );
    let res = braidmat(&["build", "--config", s(&cfg), "--theta", "0.5"]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(err.contains("m_(2,2)^(-)"), "{err}");
    assert!(res.stdout.is_empty());
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"N\": 2, \"mode\": ").unwrap();
    for args in [
        vec!["verify", "--config", s(&path)],
        vec!["build", "--config", s(&path), "--theta", "0"],
    ] {
        assert_eq!(braidmat(&args).status.code(), Some(2));
    }
    let missing = dir.path().join("missing.json");
    assert_eq!(
        braidmat(&["period", "--config", s(&missing)]).status.code(),
        Some(2)
    );
    assert_eq!(
        braidmat(&["verify", "--config", s(&path), "--suite", "nope"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_all_on_n6_unitary_passes() {
    let dir = TempDir::new().unwrap();
    let mut params = Vec::new();
    let mut v = 0.1;
    for i in 1..=3 {
        for j in 1..=3 {
            for eps in ["+", "-"] {
                params.push(json!({"i": i, "j": j, "epsilon": eps, "value": v}));
                v = -(v + 0.17);
            }
        }
    }
    let cfg = write(
        &dir,
        "n6.json",
        &json!({"N": 6, "mode": "unitary", "parameters": params}),
    );
    let report = dir.path().join("report.json");
    let res = braidmat(&[
        "verify",
        "--config",
        s(&cfg),
        "--suite",
        "all",
        "--samples",
        "3",
        "--report",
        s(&report),
    ]);
    assert_eq!(
        res.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let rep = read_json(&report);
    assert_eq!(rep["passed"], true);
    assert_eq!(rep["N"], 6);
    assert_eq!(rep["seed"], 42);
    assert_eq!(rep["tolerance"], 1e-10);
    let checks = rep["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().any(|c| c["name"] == "braid"));
    assert!(checks.iter().any(|c| c["name"] == "unitarity"));
}

#[test]
fn broken_symmetry_fails_braid_suite() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "broken.json",
        &json!({
            "N": 4,
            "mode": "real",
            "enforce_symmetry": false,
            "parameters": [
                {"i": 1, "j": 1, "epsilon": "+", "value": 0.7},
                {"i": 1, "j": 2, "epsilon": "-", "value": -0.4},
                {"i": 4, "j": 1, "epsilon": "+", "value": 1.9}
            ]
        }),
    );
    let res = braidmat(&[
        "verify",
        "--config",
        s(&cfg),
        "--suite",
        "braid",
        "--samples",
        "4",
    ]);
    assert_eq!(res.status.code(), Some(1));
    let rep = stdout_json(&res);
    assert_eq!(rep["passed"], false);
    assert!(rep["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["passed"] == false));
}

#[test]
fn entangle_quarter_pi() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "n2.json", &n2("unitary"));
    let res = braidmat(&["entangle", "--config", s(&cfg), "--theta", "pi/4"]);
    assert_eq!(res.status.code(), Some(0));
    let scan = stdout_json(&res);
    let first = &scan["records"][0];
    assert_eq!(
        (first["a"].as_u64(), first["b"].as_u64()),
        (Some(1), Some(1))
    );
    assert!((first["entropy"].as_f64().unwrap() - 1.0).abs() <= 1e-9);
    assert_eq!(first["schmidt_rank"], 2);
    assert_eq!(scan["exceptional"], json!([]));
}

#[test]
fn entangle_rejects_real_mode() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "n2.json", &n2("real"));
    assert_eq!(
        braidmat(&["entangle", "--config", s(&cfg), "--theta", "0.3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn period_of_rational_parameters() {
    let dir = TempDir::new().unwrap();
    for (p, m, t) in [([1, 1], [2, 1], 2.0), ([1, 2], [1, 3], 12.0)] {
        let cfg = write(
            &dir,
            "per.json",
            &json!({"N": 2, "mode": "unitary", "parameters": [
                {"i": 1, "j": 1, "epsilon": "+", "rational": p},
                {"i": 1, "j": 1, "epsilon": "-", "rational": m}
            ]}),
        );
        let res = braidmat(&["period", "--config", s(&cfg)]);
        assert_eq!(res.status.code(), Some(0));
        let v = stdout_json(&res);
        assert_eq!(v["periodic"], true);
        assert_eq!(v["commensurate"], true);
        let period = v["period"].as_f64().unwrap();
        assert!((period - t * std::f64::consts::PI).abs() <= 1e-12 * period);
    }
}

#[test]
fn period_of_float_parameters_is_unknown() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "n2.json", &n2("unitary"));
    let res = braidmat(&["period", "--config", s(&cfg)]);
    assert_eq!(res.status.code(), Some(0));
    let v = stdout_json(&res);
    assert_eq!(v["periodic"], false);
    assert_eq!(v["commensurate"], Value::Null);
}

#[test]
fn reference_composition_point() {
    let res = braidmat(&["reference", "--n", "1", "--z1", "0.5", "--z2", "0.5"]);
    assert_eq!(res.status.code(), Some(0));
    let v = stdout_json(&res);
    assert_eq!(v["passed"], true);
    assert!((v["z3"].as_f64().unwrap() - 4.0 / 3.0).abs() <= 1e-13);
    assert_eq!(v["scalar"].as_f64().unwrap(), 0.75);
}

#[test]
fn reference_outside_domain_is_a_usage_error() {
    assert_eq!(
        braidmat(&["reference", "--n", "1", "--z1", "1", "--z2", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        braidmat(&["reference", "--n", "0", "--z1", "0.1", "--z2", "0.2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn identical_invocations_are_bit_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "n2.json", &n2("unitary"));
    let run = |extra: &[&str]| {
        let mut args = vec![
            "verify",
            "--config",
            s(&cfg),
            "--seed",
            "7",
            "--samples",
            "5",
        ];
        args.extend_from_slice(extra);
        braidmat(&args).stdout
    };
    assert_eq!(run(&[]), run(&[]));
    assert_ne!(run(&[]), run(&["--seed", "8"]));
    let build = || braidmat(&["build", "--config", s(&cfg), "--theta", "3pi/4"]).stdout;
    assert_eq!(build(), build());
}

use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn taulab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_taulab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn rank_one_first_row() {
    let o = taulab(&["exp", "--lambda", "1", "--xi", "1", "--grid", "0:3:0.1"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("t,tau,sigma\n"));
    let r = rows(&s);
    assert_eq!(r.len(), 31);
    assert_eq!(r[0][1], 0.5);
    for row in &r {
        assert!((row[1] - (1.0 - (-2.0 * row[0]).exp() / 2.0)).abs() < 1e-12);
    }
}

#[test]
fn empty_symbol_is_constant() {
    let o = taulab(&["exp", "--grid", "0,1,2"]);
    assert!(o.status.success());
    for row in rows(&stdout(&o)) {
        assert_eq!(row[1..], [1.0, 0.0]);
    }
}

#[test]
fn usage_errors_exit_two() {
    let dup = taulab(&["exp", "--lambda", "1,1", "--xi", "1,1"]);
    assert_eq!(dup.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&dup.stderr).contains("duplicate"));
    let bad = taulab(&["exp", "--lambda", "1,q", "--xi", "1,1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("--lambda item 2"));
    assert_eq!(taulab(&["exp", "--lambda", "1", "--xi", "1,2"]).status.code(), Some(2));
    assert_eq!(taulab(&["nope"]).status.code(), Some(2));
    assert_eq!(taulab(&["--help"]).status.code(), Some(0));
}

#[test]
fn numerical_errors_exit_three() {
    // the expansion at infinity converges only outside the disc holding the poles
    let o = taulab(&["pvi", "--grid", "0.6"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn cauchy_table_approaches_limit() {
    let o = taulab(&["cauchy", "--beta", "1", "--K", "1", "--N", "4,8,16,32"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("N,log_d,root,gap,limit\n"));
    let r = rows(&s);
    let limit = 1.0 / 1f64.sinh();
    assert!((r[3][4] - limit).abs() < 1e-15);
    assert!((limit - 0.8509).abs() < 1e-4);
    assert!(r.windows(2).all(|w| w[1][3] < w[0][3]));
}

#[test]
fn manifest_reruns_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let o = taulab(&[
        "lame",
        "--k2",
        "0.5",
        "--grid",
        "0:1:0.25",
        "--out",
        a.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let m = json(&a.with_extension("json"));
    assert_eq!(m["invariants"]["e"], serde_json::json!([0.5, 0.0, -0.5]));
    assert!(m["truncation"]["M"].as_u64().unwrap() >= 16);
    let o = taulab(&[
        "lame",
        "--config",
        a.with_extension("json").to_str().unwrap(),
        "--out",
        b.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"lambda": [1, 2], "xi": ["1", "1"], "grid": "0"}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let base = rows(&stdout(&taulab(&["exp", "--config", c])));
    let plain = rows(&stdout(&taulab(&[
        "exp", "--lambda", "1,2", "--xi", "1,1", "--grid", "0",
    ])));
    assert_eq!(base, plain);
    let over = rows(&stdout(&taulab(&["exp", "--config", c, "--lambda", "1,3"])));
    let direct = rows(&stdout(&taulab(&[
        "exp", "--lambda", "1,3", "--xi", "1,1", "--grid", "0",
    ])));
    assert_eq!(over, direct);
    assert_ne!(over, base);
    assert_eq!(taulab(&["exp", "--config", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn check_is_deterministic_and_records_tol() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, extra: &[&str]| {
        let p = dir.path().join(name);
        let mut args = vec!["check", "--suite", "lame", "--seed", "7", "--out", p.to_str().unwrap()];
        args.extend_from_slice(extra);
        assert!(taulab(&args).status.success());
        json(&p)
    };
    let strip = |v: &Value| {
        v["criteria"][0]["measurements"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|m| m["name"] != "runtime_s")
            .cloned()
            .collect::<Vec<_>>()
    };
    let (a, b) = (run("a.json", &[]), run("b.json", &[]));
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(a["failed"], serde_json::json!([]));
    let t = run("t.json", &["--tol", "1e-3"]);
    assert_eq!(t["tol_override"], 1e-3);
    assert!(strip(&t)
        .iter()
        .all(|m| m["tolerance"].is_null() || m["tolerance"].as_f64().unwrap() >= 1e-3));
}

#[test]
fn module_check_flag_runs_its_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("b.csv");
    let o = taulab(&[
        "bessel",
        "--nu",
        "0",
        "--weight-cap",
        "10",
        "--grid",
        "0.5:3:0.1",
        "--check",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("criterion  5 PASS"));
    let m = json(&p.with_extension("json"));
    assert_eq!(m["checks_passed"], true);
    assert_eq!(m["truncation"]["weight_cap"], 10);
}

#[test]
fn drivers_emit_finite_curves() {
    for args in [
        vec!["pvi", "--grid", "1.5:2.5:0.5"],
        vec!["hypergeom", "--grid", "1.5,2"],
        vec!["bessel", "--method", "hill", "--grid", "1"],
    ] {
        let o = taulab(&args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        for row in rows(&stdout(&o)) {
            assert!(row.iter().all(|v| v.is_finite()));
        }
    }
}

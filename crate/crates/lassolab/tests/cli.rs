use std::path::Path;
use std::process::{Command, Output};

use lassolab::config::{DesignSource, EntropyInputs, EntropyRoute, ExperimentConfig, Lambda0Choice};
use lassolab_core::{DesignFamily, NoiseKind};
use proptest::prelude::*;
use serde_json::Value;

fn lassolab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lassolab")).args(args).current_dir(dir).env("LASSOLAB_LOG", "quiet").output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn gen_design(dir: &Path, name: &str) {
    let out = lassolab(dir, &["gen", "--kind", "equicorrelated", "--r", "0.5", "--n", "100", "--p", "20", "--seed", "7", "--out", name]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    gen_design(dir.path(), "a.csv");
    gen_design(dir.path(), "b.csv");
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 100);
    assert!(text.lines().all(|l| l.split(',').count() == 20));
}

#[test]
fn diag_reports_sandwich() {
    let dir = tempfile::tempdir().unwrap();
    gen_design(dir.path(), "d.csv");
    let out = lassolab(dir.path(), &["diag", "--design", "d.csv", "--S", "1,2,3", "--L", "6", "--out", "g.json"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("diag: "));
    let v = json(&dir.path().join("g.json"));
    assert_eq!(v["schema"], 1);
    assert_eq!(v["S"], serde_json::json!([1, 2, 3]));
    let get = |k: &str| v[k].as_f64().unwrap();
    let (phi, l1, lmin, re) = (get("phi2"), get("lambda1_min2"), get("lambda_min2"), get("phi2_re"));
    assert!(l1 >= lmin - 1e-8 && lmin >= l1 / 3.0 - 1e-8);
    assert!(phi <= l1 + 1e-8 && re <= phi + 1e-8);
}

#[test]
fn cover_and_entropy_documents() {
    let dir = tempfile::tempdir().unwrap();
    lassolab(dir.path(), &["gen", "--kind", "ar1", "--r", "0.8", "--n", "40", "--p", "5", "--seed", "1", "--out", "d.csv"]);
    let out = lassolab(dir.path(), &["cover", "--design", "d.csv", "--rho", "0.5,0.9", "--out", "c.json", "--csv", "c.csv"]);
    assert!(out.status.success());
    let v = json(&dir.path().join("c.json"));
    for key in ["radii", "packing", "covering_upper", "covering_exact", "decorrelation"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(v["covering_exact"].is_array());
    assert!(v["decorrelation"]["0.5"].as_u64().unwrap() <= v["decorrelation"]["0.9"].as_u64().unwrap());
    let csv = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "radius,packing,covering_upper,covering_exact");
    assert_eq!(csv.lines().count(), 12);

    let out = lassolab(dir.path(), &["entropy", "--design", "d.csv", "--alpha", "0.5", "--A", "3", "--out", "e.json"]);
    assert!(out.status.success());
    let e = json(&dir.path().join("e.json"));
    assert_eq!(e["alpha"], 0.5);
    assert_eq!(e["bounds"].as_array().unwrap().len(), 3);
    for k in ["K0", "B", "lambda0"] {
        assert!(e[k].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn lasso_from_response_file() {
    let dir = tempfile::tempdir().unwrap();
    lassolab(dir.path(), &["gen", "--kind", "orthonormal", "--n", "20", "--p", "4", "--seed", "2", "--out", "d.csv"]);
    let text = std::fs::read_to_string(dir.path().join("d.csv")).unwrap();
    // y = 3ψ₁ on an orthonormal design: β̂₁ = 3 − λ/2
    let y: Vec<String> = text.lines().map(|l| (3.0 * l.split(',').next().unwrap().parse::<f64>().unwrap()).to_string()).collect();
    std::fs::write(dir.path().join("y.txt"), y.join("\n")).unwrap();
    let out = lassolab(dir.path(), &["lasso", "--design", "d.csv", "--response", "y.txt", "--lambda", "0.4", "--out", "l.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("l.json"));
    let b = v["beta_hat"].as_array().unwrap();
    assert!((b[0].as_f64().unwrap() - 2.8).abs() < 1e-6);
    assert!(b[1..].iter().all(|x| x.as_f64().unwrap().abs() < 1e-9));
}

#[test]
fn oracle_reports_one_based_partition() {
    let dir = tempfile::tempdir().unwrap();
    lassolab(dir.path(), &["gen", "--kind", "orthonormal", "--n", "30", "--p", "5", "--seed", "2", "--out", "d.csv"]);
    let out = lassolab(
        dir.path(),
        &["oracle", "--design", "d.csv", "--beta0", "2,0,-2,0,0", "--S", "1,3", "--lambda0", "0.1", "--alpha", "1", "--search", "--out", "o.json"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("o.json"));
    assert_eq!(v["partition"]["S"], serde_json::json!([1, 3]));
    assert_eq!(v["lambda"], 0.1);
    assert_eq!(v["search"]["S_star"], serde_json::json!([1, 3]));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    gen_design(dir.path(), "d.csv");
    assert_eq!(lassolab(dir.path(), &["diag", "--design", "d.csv", "--S", "1", "--bogus"]).status.code(), Some(2));
    assert_eq!(lassolab(dir.path(), &["diag", "--design", "d.csv", "--S", "0,1"]).status.code(), Some(2));
    assert_eq!(lassolab(dir.path(), &["frobnicate"]).status.code(), Some(2));
    let bad = lassolab(dir.path(), &["gen", "--kind", "equicorrelated", "--r", "1.5", "--n", "10", "--p", "3"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("equicorrelation"));
    assert_eq!(lassolab(dir.path(), &["diag", "--design", "missing.csv", "--S", "1"]).status.code(), Some(1));
}

#[test]
fn verify_accepts_config_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    gen_design(dir.path(), "d.csv");
    let cfg = r#"{"design": {"source": "csv", "path": "d.csv"},
        "beta0": [1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 0.5, 0, 0, 0, 0, -0.5, 0, 0, 0, 0],
        "noise": {"kind": "gaussian", "sigma": 1}, "alpha": 1, "lambda_rule": "classic", "c": 2,
        "S": [1, 6, 11, 16], "lambda0": {"mode": "sup"}, "draws": 50, "seed": 3}"#;
    std::fs::write(dir.path().join("exp.json"), cfg).unwrap();
    let out = lassolab(dir.path(), &["verify", "--config", "exp.json", "--out", "v.json", "--csv", "v.csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("v.json"));
    assert_eq!(v["aggregates"]["violations_given_certificate"], 0);
    assert_eq!(v["records"].as_array().unwrap().len(), 50);
    assert!(v["config"].get("out").is_none());
    let csv = std::fs::read_to_string(dir.path().join("v.csv")).unwrap();
    assert!(csv.starts_with("index,lambda,lambda0,lhs,rhs,ratio,certified,converged,violation,talpha_global_estimate\n"));

    let out = lassolab(dir.path(), &["verify", "--config", "exp.json", "--draws", "20", "--lambda-rule", "fixed:0.3", "--out", "w.json"]);
    assert_eq!(out.status.code(), Some(0));
    let w = json(&dir.path().join("w.json"));
    assert_eq!(w["draws"], 20);
    assert!(w["records"].as_array().unwrap().iter().all(|r| r["lambda"] == 0.3));

    let out = lassolab(dir.path(), &["verify", "--config", "exp.json", "--lambda-rule", "sometimes"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn probcheck_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    gen_design(dir.path(), "d.csv");
    let out = lassolab(
        dir.path(),
        &["probcheck", "--design", "d.csv", "--alpha", "1", "--lambda0", "0.5", "--draws", "200", "--out", "p.json"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("p.json"));
    assert_eq!(v["schema"], 1);
    assert_eq!(v["lambda0"], 0.5);
    let f = v["failure_frequency"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&f));
}

fn config_strategy() -> impl Strategy<Value = ExperimentConfig> {
    let design = prop_oneof![
        ("[a-z]{1,8}\\.csv", any::<bool>()).prop_map(|(p, rescale)| DesignSource::Csv { path: p.into(), rescale }),
        (0.0..0.9f64, 1usize..200, 1usize..50, any::<u64>())
            .prop_map(|(r, n, p, seed)| DesignSource::Generate { family: DesignFamily::Ar1 { r }, n, p, seed }),
    ];
    let noise = prop_oneof![
        (0.0..3.0f64).prop_map(|sigma| NoiseKind::Gaussian { sigma }),
        (0.1..3.0f64).prop_map(|range| NoiseKind::BoundedUniform { range }),
        (0.1..3.0f64).prop_map(|scale| NoiseKind::Rademacher { scale }),
    ];
    let lambda0 = prop_oneof![
        (0.01..5.0f64).prop_map(|value| Lambda0Choice::Value { value }),
        Just(Lambda0Choice::Entropy),
        Just(Lambda0Choice::Sup),
        (0.5..0.99f64, 1usize..5000).prop_map(|(quantile, draws)| Lambda0Choice::Calibrated { quantile, draws }),
    ];
    let route = prop_oneof![
        (0.6..3.0f64).prop_map(|m| EntropyRoute::Eigen { m }),
        (0.1..5.0f64).prop_map(|w| EntropyRoute::Cover { w }),
        (0.05..0.95f64, 0.1..10.0f64).prop_map(|(alpha, a)| EntropyRoute::Explicit { alpha, a }),
    ];
    let entropy = (route, 0.1..3.0f64, proptest::option::of(0.5..5.0f64), 0.1..4.0f64)
        .prop_map(|(route, constant, k, t)| EntropyInputs { route, constant, k, t });
    (
        design,
        proptest::collection::vec(-2.0..2.0f64, 0..10),
        noise,
        0.0..=1.0f64,
        prop_oneof![Just("classic".to_string()), Just("slow".to_string()), Just("tradeoff".to_string()), Just("fixed:0.25".to_string())],
        (0.5..3.0f64, proptest::collection::vec(1usize..30, 0..5), lambda0, entropy),
        (1usize..10_000, any::<u64>(), proptest::option::of("[a-z]{1,6}\\.json")),
    )
        .prop_map(|(design, beta0, noise, alpha, lambda_rule, (c, s, lambda0, entropy), (draws, seed, out))| ExperimentConfig {
            design,
            beta0,
            noise,
            alpha,
            lambda_rule,
            c,
            s,
            lambda0,
            entropy,
            draws,
            seed,
            out: out.map(Into::into),
        })
}

proptest! {
    #[test]
    fn config_round_trips(cfg in config_strategy()) {
        let text = cfg.to_json();
        prop_assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    }
}

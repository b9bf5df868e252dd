use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use secinvest::records::read_table;

const BIN: &str = env!("CARGO_BIN_EXE_secinvest");

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn secinvest(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("SECINVEST_OUTPUT_DIR").output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("cfg.toml");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

/// Every output file except the manifest, which carries a timestamp.
fn records(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_type().unwrap().is_file() && e.file_name() != "manifest.json")
        .map(|e| (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn shipped_configs_validate() {
    for entry in fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let out = secinvest(&["validate", "--config", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn invalid_lambda_exits_2_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"
experiment = "solve"
[payoff]
game = "sum-of-investments"
benefit = "log"
c0 = 0.5
lambda = -0.5
[beliefs]
kind = "regular"
degree = 2
"#,
    );
    let out_dir = tmp.path().join("out");
    let out = secinvest(&["run", "--config", &cfg, "--output-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("payoff.lambda"));
    assert!(!out_dir.exists());
}

#[test]
fn unknown_keys_and_missing_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "experiment = \"lemma-suite\"\ncolour = 1\n");
    assert_eq!(secinvest(&["validate", "--config", &cfg]).status.code(), Some(2));
    let missing = tmp.path().join("nope.toml");
    assert_eq!(secinvest(&["validate", "--config", missing.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn budget_overrun_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"
experiment = "enumerate"
[payoff]
game = "sum-of-investments"
benefit = "power"
alpha = 0.5
c0 = 0.8
lambda = 1.0
[beliefs]
kind = "independent"
row = [0.3, 0.3, 0.4]
degrees = [1, 2, 3]
[grid]
resolution = 21
[solver]
budget = 100
"#,
    );
    let out_dir = tmp.path().join("out");
    let out = secinvest(&["run", "--config", &cfg, "--output-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!out_dir.exists());
}

#[test]
fn same_seed_same_records_and_manifest_reruns() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("substitutes.toml");
    let cfg = cfg.to_str().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for (dir, workers) in [(&a, "1"), (&b, "3")] {
        let out = secinvest(&["run", "--config", cfg, "--output-dir", dir.to_str().unwrap(), "--seed", "99", "--workers", workers]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(records(&a), records(&b));

    // The manifest alone is enough to rerun.
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seeds"]["root"], 99);
    let again = write_config(tmp.path(), manifest["config_toml"].as_str().unwrap());
    let c = tmp.path().join("c");
    assert!(secinvest(&["run", "--config", &again, "--output-dir", c.to_str().unwrap()]).status.success());
    assert_eq!(records(&a), records(&c));

    let other = tmp.path().join("d");
    assert!(secinvest(&["run", "--config", cfg, "--output-dir", other.to_str().unwrap(), "--seed", "100"]).status.success());
    let eq = |d: &Path| fs::read(d.join("equilibria.csv")).unwrap();
    assert_ne!(eq(&a), eq(&other), "random starts should depend on the seed");
}

#[test]
fn output_dir_falls_back_to_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let target = tmp.path().join("from-env");
    let cfg = configs().join("best_shot.toml");
    let out = Command::new(BIN)
        .args(["run", "--config", cfg.to_str().unwrap()])
        .env("SECINVEST_OUTPUT_DIR", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("equilibria.csv").exists());
    assert!(target.join("summary.txt").exists());
    let summary = fs::read_to_string(target.join("summary.txt")).unwrap();
    assert!(summary.contains("p*=0.500000"), "{summary}");
}

#[test]
fn c0_sweep_tracks_the_indifference_curve() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("best_shot.toml");
    let values = [0.1, 0.25, 0.5, 0.75, 0.9];
    let list = values.map(|v| v.to_string()).join(",");
    let out = secinvest(&[
        "sweep", "--config", cfg.to_str().unwrap(), "--output-dir", tmp.path().to_str().unwrap(), "--param", "c0", "--values", &list,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_table(&fs::read(tmp.path().join("sweep.csv")).unwrap()).unwrap();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (c0, action, converged) = (col("c0"), col("action"), col("converged"));
    assert_eq!(rows.len(), values.len() * 5);
    for row in &rows {
        let c: f64 = row[c0].parse().unwrap();
        let p: f64 = row[action].parse().unwrap();
        assert_eq!(row[converged], "true");
        assert!((p - (1.0 - c.sqrt())).abs() < 1e-6, "c0={c} p={p}");
    }
    for v in values {
        assert!(tmp.path().join(format!("c0={v}")).join("manifest.json").exists());
    }
}

#[test]
fn empty_or_bad_sweeps_fail_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("best_shot.toml");
    let cfg = cfg.to_str().unwrap();
    let dir = tmp.path().join("s");
    let dir = dir.to_str().unwrap();
    for (param, values) in [("c0", ""), ("c0", "0.2,x"), ("alpha", "0.5"), ("r_target", "0.1"), ("lambda", "0.5")] {
        let out = secinvest(&["sweep", "--config", cfg, "--output-dir", dir, "--param", param, "--values", values]);
        assert_eq!(out.status.code(), Some(2), "{param}={values}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert!(!Path::new(dir).exists());
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn axilab(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_axilab"))
        .args(args)
        .env("AXILAB_OUT", root)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn zero_scenario_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let out = axilab(tmp.path(), &["simulate", "--scenario", "zero", "--out", "z"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("z");
    let m = json(&dir.join("simulate.manifest.json"));
    assert_eq!(m["summary"]["max_divergence"], 0.0);
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(m["config"]["scenario"]["name"], "zero");
    let stats = std::fs::read_to_string(dir.join("stats.csv")).unwrap();
    for line in stats.lines().skip(1) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells[4], 0.0);
        assert_eq!(cells[6], 0.0);
    }

    let out = axilab(tmp.path(), &["criterion", "--out", "z"]);
    assert!(out.status.success());
    assert_eq!(json(&dir.join("criterion.json"))["all_pass"], true);
    let first = std::fs::read(dir.join("criterion.csv")).unwrap();
    assert!(axilab(tmp.path(), &["criterion", "--out", "z"]).status.success());
    assert_eq!(first, std::fs::read(dir.join("criterion.csv")).unwrap());
}

#[test]
fn rigid_rotation_verify_and_oscillation() {
    let tmp = tempfile::tempdir().unwrap();
    let common = ["--n-rho", "32", "--n-z", "64", "--t-end", "0.05", "--dt", "2e-4", "--stride", "25", "--out", "rr"];
    let run = |cmd: &str| {
        let mut args = vec![cmd];
        args.extend_from_slice(&common);
        axilab(tmp.path(), &args)
    };
    assert!(run("simulate").status.success());
    let out = run("verify");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ledger = json(&tmp.path().join("rr/ledger.json"));
    assert_eq!(ledger["failures"], 0);
    assert_eq!(ledger["rows"].as_array().unwrap().len(), 7);
    let out = run("oscillation");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let decay = json(&tmp.path().join("rr/decay.json"));
    assert_eq!(decay["max_principle"]["violations"], 0);
}

#[test]
fn constants_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let out = axilab(tmp.path(), &["constants", "--out", "c", "--sweep", "g2r=1:2:11"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(tmp.path().join("c/constants.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 11);
    let c1: f64 = rows[0][col("c1")].parse().unwrap();
    assert!((c1 - 200.574_340_423_307_855).abs() < 1e-10);
    let beta2: Vec<f64> = rows.iter().map(|r| r[col("beta2_log2")].parse().unwrap()).collect();
    assert!(beta2.windows(2).all(|w| w[1] < w[0]));
    assert!(rows.iter().all(|r| r[col("error")].is_empty()));

    let out = axilab(tmp.path(), &["constants", "--out", "c", "--set", "tau1=3"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(tmp.path().join("c/constants.csv")).unwrap();
    assert!(text.lines().nth(1).unwrap().contains("domain error"));

    assert_eq!(axilab(tmp.path(), &["constants", "--sweep", "g2r=1:x:3"]).status.code(), Some(1));
    assert_eq!(axilab(tmp.path(), &["constants", "--sweep", "nope=1:2:3"]).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = axilab(tmp.path(), &["simulate", "--alpha", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1/224"));
    assert_eq!(axilab(tmp.path(), &["criterion", "--out", "missing"]).status.code(), Some(1));
    assert_eq!(axilab(tmp.path(), &["simulate", "--dt", "0.01"]).status.code(), Some(2));
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "unknown_key = 3\n").unwrap();
    assert_eq!(axilab(tmp.path(), &["simulate", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn config_file_is_echoed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(
        &cfg,
        "out_dir = \"lo\"\nstride = 5\n[scenario]\nname = \"lamb_oseen\"\n[grid]\nrho_max = 2.0\nn_rho = 16\nn_z = 16\n[solver]\ndt = 1e-3\nt_end = 0.01\n",
    )
    .unwrap();
    let out = axilab(tmp.path(), &["simulate", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = json(&tmp.path().join("lo/simulate.manifest.json"));
    assert_eq!(m["config"]["scenario"]["name"], "lamb_oseen");
    assert_eq!(m["config"]["grid"]["rho_max"], 2.0);
    assert_eq!(m["summary"]["snapshots"], 3);
}

//! End-to-end runs of the `ftasep` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

fn ftasep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftasep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(experiment: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        experiment,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    ftasep(&args)
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn invariance_check_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "inv.json",
        r#"{
  "experiment": "invariance-check",
  "lattice": { "topology": "ring", "L": 1, "rho": 0.75 },
  "seed": 0,
  "output": { "dir": "unused" }
}"#,
    );
    let out = tmp.path().join("inv");
    let o = run("invariance-check", &cfg, &out, &[]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = fs::read_to_string(out.join("invariance.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("rho,f_id,integral"));
    let values: Vec<f64> = lines
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    // indicators of every word of length 1..=5
    assert_eq!(values.len(), 2 + 4 + 8 + 16 + 32);
    assert!(values.iter().all(|v| v.abs() <= 1e-12));
}

#[test]
fn ring_exact_six_four_is_uniform() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "ring.json",
        r#"{
  "experiment": "ring-exact",
  "lattice": { "topology": "ring", "L": 6, "k": 4 },
  "seed": 0,
  "output": { "dir": "unused" }
}"#,
    );
    let out = tmp.path().join("ring");
    assert_eq!(run("ring-exact", &cfg, &out, &[]).status.code(), Some(0));
    let csv = fs::read_to_string(out.join("stationary.csv")).unwrap();
    let probs: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(probs.len(), 9);
    assert!(probs.iter().all(|p| (p - 1.0 / 9.0).abs() <= 1e-9));
}

#[test]
fn unknown_key_is_a_line_numbered_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.json",
        r#"{
  "experiment": "ring-exact",
  "lattice": { "topology": "ring", "L": 6, "k": 4 },
  "seed": 0,
  "output": { "dir": "unused" },
  "trails": 3
}"#,
    );
    let out = tmp.path().join("bad");
    let o = run("ring-exact", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 6"), "{err}");
    assert!(!out.exists());
    // nothing left behind next to the target either
    let leftovers: Vec<_> = fs::read_dir(tmp.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.contains("tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn inconsistent_parameters_are_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "odd.json",
        r#"{
  "experiment": "critical-absorption",
  "lattice": { "topology": "ring", "L": 21, "k": 10 },
  "trials": 5,
  "seed": 0,
  "output": { "dir": "unused" }
}"#,
    );
    let o = run("critical-absorption", &cfg, &tmp.path().join("x"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    let o = run("ring-exact", &cfg, &tmp.path().join("x"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!tmp.path().join("x").exists());
}

#[test]
fn failed_checks_exit_two_with_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "lim.json",
        r#"{
  "experiment": "limit-table",
  "lattice": { "topology": "ring", "L": 1 },
  "seed": 0,
  "params": { "rhos": [0.3], "n_max": 6 },
  "output": { "dir": "unused" }
}"#,
    );
    let out = tmp.path().join("lim");
    let o = run("limit-table", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    let m = manifest(&out);
    let failed: Vec<&str> = m["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| !c["passed"].as_bool().unwrap())
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, vec!["right_consistency_rho_0.3"]);
    assert!(out.join("limit_table.csv").is_file());
}

fn critical_config(dir: &Path) -> PathBuf {
    write_config(
        dir,
        "crit.json",
        r#"{
  "experiment": "critical-absorption",
  "lattice": { "topology": "ring", "L": 20, "k": 10 },
  "dynamics": { "t_max": 10.0 },
  "trials": 200,
  "seed": 42,
  "output": { "dir": "unused" }
}"#,
    )
}

#[test]
fn manifest_lists_every_file_with_its_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("crit");
    assert_eq!(
        run(
            "critical-absorption",
            &critical_config(tmp.path()),
            &out,
            &[]
        )
        .status
        .code(),
        Some(0)
    );
    let m = manifest(&out);
    let files = m["files"].as_array().unwrap();
    let mut listed: Vec<String> = files
        .iter()
        .map(|f| f["name"].as_str().unwrap().to_string())
        .collect();
    for f in files {
        let bytes = fs::read(out.join(f["name"].as_str().unwrap())).unwrap();
        let digest: String = Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        assert_eq!(f["sha256"].as_str().unwrap(), digest);
    }
    let mut present: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "manifest.json")
        .collect();
    listed.sort();
    present.sort();
    assert_eq!(listed, present);
    assert_eq!(m["seed"], 42);
    assert_eq!(m["stream_ids"].as_array().unwrap().len(), 200);
    assert_eq!(m["config"]["lattice"]["L"], 20);
}

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = critical_config(tmp.path());
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(
        run("critical-absorption", &cfg, &a, &["--workers", "1"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run("critical-absorption", &cfg, &b, &["--workers", "3"])
            .status
            .code(),
        Some(0)
    );
    for name in ["pair_decay.csv", "trials.csv", "summary.json"] {
        assert_eq!(
            fs::read(a.join(name)).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name}"
        );
    }
    let c = tmp.path().join("c");
    run("critical-absorption", &cfg, &c, &["--seed", "43"]);
    assert_ne!(
        fs::read(a.join("trials.csv")).unwrap(),
        fs::read(c.join("trials.csv")).unwrap()
    );
}

#[test]
fn output_directory_replacement_policy() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = critical_config(tmp.path());
    let out = tmp.path().join("crit");
    assert_eq!(
        run("critical-absorption", &cfg, &out, &["--trials", "5"])
            .status
            .code(),
        Some(0)
    );
    // a previous run is replaced
    assert_eq!(
        run("critical-absorption", &cfg, &out, &["--trials", "7"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(manifest(&out)["config"]["trials"], 7);

    let foreign = tmp.path().join("foreign");
    fs::create_dir(&foreign).unwrap();
    fs::write(foreign.join("notes.txt"), "keep").unwrap();
    let o = run("critical-absorption", &cfg, &foreign, &["--trials", "5"]);
    assert_ne!(o.status.code(), Some(0));
    assert_eq!(
        fs::read_to_string(foreign.join("notes.txt")).unwrap(),
        "keep"
    );
}

#[test]
fn simulate_writes_trajectories() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "sim.json",
        r#"{
  "experiment": "simulate",
  "lattice": { "topology": "ring", "L": 4, "initial": "1100" },
  "trials": 2,
  "seed": 5,
  "output": { "dir": "unused", "snapshots": true }
}"#,
    );
    let out = tmp.path().join("sim");
    let o = run("simulate", &cfg, &out, &[]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let traj = fs::read_to_string(out.join("trajectory_0001.csv")).unwrap();
    assert!(traj.starts_with("time,n11,n10,n01,n00,n_active,N_t\n"));
    let finals = fs::read_to_string(out.join("final_states.csv")).unwrap();
    for line in finals.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!((f[1], f[3]), ("1", "1010"));
    }
    assert!(out.join("snapshots_0000.txt").is_file());
}

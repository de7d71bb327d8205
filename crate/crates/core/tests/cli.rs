//! End-to-end runs of the `diagflow` binary.

use std::path::Path;
use std::process::{Command, Output};

fn diagflow(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diagflow"))
        .args(args)
        .current_dir(dir)
        .env("DIAGFLOW_WORKERS", "2")
        .output()
        .expect("binary runs")
}

fn files_under(root: &Path) -> Vec<String> {
    fn walk(dir: &Path, root: &Path, out: &mut Vec<String>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                walk(&p, root, out);
            } else {
                out.push(p.strip_prefix(root).unwrap().display().to_string());
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out.sort();
    out
}

#[test]
fn theta_prints_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = diagflow(&["theta", "--m", "2", "--n", "1"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "m,n,I1,I2,theta_star,witness_s,witness_t,weight_i,weight_j,side");
    assert_eq!(lines.len(), 7);
    assert!(lines.contains(&r#"2,1,"{1,3}","{2,3}",1,1 0 1,0 1 1,1,3,case1"#));
}

#[test]
fn theta_unbalanced_mode_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = diagflow(&["theta", "--m", "2", "--n", "1", "--mode", "unbalanced"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn malformed_toml_exits_2_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "id = \"x\"\nkind = \"sweep\nseed = [").unwrap();
    let out = diagflow(&["sweep", "--config", "bad.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(files_under(dir.path()), vec!["bad.toml".to_string()]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("config error"));
}

#[test]
fn kind_mismatch_and_bad_workers_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("t.toml"), "id = \"t\"\nkind = \"theta\"\n[theta]\nm = 1\nn = 2\n").unwrap();
    let out = diagflow(&["sweep", "--config", "t.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_diagflow"))
        .args(["theta", "--config", "t.toml"])
        .current_dir(dir.path())
        .env("DIAGFLOW_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(files_under(dir.path()), vec!["t.toml".to_string()]);
}

#[test]
fn numerical_failure_exits_3_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"
id = "cusp"
kind = "integral"
seed = 1
[integral]
m = 1
n = 1
samples = 10
measure = "joint"
flows = [[800, 800]]
[[integral.observables]]
type = "siegel"
dim = 2
"#;
    std::fs::write(dir.path().join("c.toml"), cfg).unwrap();
    let out = diagflow(&["integral", "--config", "c.toml"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(files_under(dir.path()), vec!["c.toml".to_string()]);
}

#[test]
fn case_reads_a_tuple_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tuple.json"), "[[1, 1], [9, 9]]").unwrap();
    std::fs::write(
        dir.path().join("case.toml"),
        "id = \"tr\"\nkind = \"case\"\noutput_dir = \"res\"\n[case]\nm = 1\nn = 1\ntuple_file = \"tuple.json\"\n",
    )
    .unwrap();
    let out = diagflow(&["case", "--config", "case.toml"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("terminal: case 1′ at level 2 after 0 restarts"), "{text}");

    let out = diagflow(&["case", "--config", "case.toml", "--format", "json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"]["type"], "case");
    assert_eq!(v["outcome"]["data"]["traces"][0]["steps"][0]["tag"], "OnePrime");
    assert_eq!(
        files_under(dir.path()),
        vec!["case.toml", "res/tr.json", "res/tr.txt", "tuple.json"].into_iter().map(String::from).collect::<Vec<_>>()
    );
}

#[test]
fn circle_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "id = \"c\"\nkind = \"circle\"\n[circle]\nlengths = [0.5]\n[circle.phi]\nm = 1\nn = 1\ncoeffs = [[1, 1.0, 0.0]]\n[circle.psi]\nm = 1\nn = 1\ncoeffs = [[1, 1.0, 0.0]]\n";
    std::fs::write(dir.path().join("c.toml"), cfg).unwrap();
    let out = diagflow(&["circle", "--config", "c.toml"], dir.path());
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("out/c.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let gap: f64 = row[6].parse().unwrap();
    assert!((gap - 4.0 / std::f64::consts::PI.powi(2)).abs() < 1e-15);
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use halfhandle::oracle::CobordismBuild;
use halfhandle::{CobordismFlags, CriticalPoint, Level, MorseDatum, PointKind, Trajectory};

const PANTS: &str = r#"{
    "sigma0": [{"shape": "circle", "marks": ["p"]}, {"shape": "circle", "marks": ["q"]}],
    "moves": [{"level": "0.5", "kind": "interior", "index": 1, "feet": ["p", "q"]}]
}"#;

fn run(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_halfhandle"));
    cmd.args(args).env_remove("HF_SEED");
    if let Some(s) = seed_env {
        cmd.env("HF_SEED", s);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn assert_sorted_json(text: &str) {
    let v: Value = serde_json::from_str(text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&v).unwrap(), text.trim_end());
}

fn error_kind(o: &Output) -> String {
    let v: Value = serde_json::from_str(&stdout(o)).unwrap();
    assert!(!o.stderr.is_empty());
    v["error"].as_str().unwrap().to_string()
}

fn two_saddles() -> MorseDatum {
    MorseDatum::new(
        CobordismFlags::open(1),
        vec![
            CriticalPoint::new("a", PointKind::Interior, 0, Level::from_ratio(1, 5)),
            CriticalPoint::new("b", PointKind::Interior, 1, Level::from_ratio(2, 5)),
            CriticalPoint::new("c", PointKind::Interior, 1, Level::from_ratio(3, 5)),
        ],
        vec![Trajectory::new("a", "b", 1)],
    )
}

#[test]
fn table_prints_every_pair() {
    let o = run(&["table", "--n", "2"], None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("type of p1"));
    let rows: usize = PointKind::ALL.iter().map(|k| k.index_range(2).count()).sum();
    assert_eq!(
        text.lines().filter(|l| l.trim_start().starts_with("k=")).count(),
        3 * rows
    );
}

#[test]
fn check_accepts_a_valid_datum() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "d.json", &two_saddles().to_json());
    let o = run(&["check", arg(&f)], None);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["violations"], Value::Array(vec![]));
}

#[test]
fn check_rejects_a_downward_trajectory() {
    let dir = TempDir::new().unwrap();
    let mut d = two_saddles();
    d.trajectories.push(Trajectory::new("c", "a", 1));
    let f = write(&dir, "d.json", &d.to_json());
    let o = run(&["check", arg(&f)], None);
    assert_eq!(o.status.code(), Some(2));
    assert_sorted_json(&stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["violations"][0]["rule"], "not_increasing");
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn malformed_input_exits_one() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "d.json", "{ not json");
    let o = run(&["check", arg(&f)], None);
    assert_eq!(o.status.code(), Some(1));
    error_kind(&o);
    let o = run(&["check", arg(&dir.path().join("missing.json"))], None);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["model", "scan-u21", "--eps", "0", "--delta", "0.001"], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn refused_cancellation_exits_two() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "d.json", &two_saddles().to_json());
    let o = run(&["cancel", arg(&f), "--pair", "b", "c"], None);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "IndexMismatchError");
    let o = run(&["cancel", arg(&f), "--pair", "a", "b"], None);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn pants_normalization_is_obstructed() {
    let dir = TempDir::new().unwrap();
    let build = write(&dir, "b.json", PANTS);
    let datum = CobordismBuild::from_json(PANTS).unwrap().to_datum();
    let f = write(&dir, "d.json", &datum.to_json());
    let o = run(&["normalize", arg(&f), "--build", arg(&build)], None);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "ObstructionError");
    assert!(stdout(&o).contains("pair-of-pants"));
    let o = run(&["oracle", "chi", arg(&build)], None);
    assert_eq!(o.status.code(), Some(0));
    assert_sorted_json(&stdout(&o));
}

#[test]
fn nonconvergent_model_exits_three() {
    let o = run(&["model", "critical", "--a", "1", "--grid-step", "5"], None);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_kind(&o), "NonConvergenceError");
}

#[test]
fn normalize_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "d.json", &two_saddles().to_json());
    let a = run(&["normalize", arg(&f)], None);
    let b = run(&["normalize", arg(&f)], None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_sorted_json(&stdout(&a));
}

#[test]
fn seed_flag_and_environment_agree() {
    let flag = run(&["sample", "--seed", "7", "--max-points", "6"], None);
    let env = run(&["sample", "--max-points", "6"], Some("7"));
    let other = run(&["sample", "--seed", "8", "--max-points", "6"], Some("7"));
    assert_eq!(flag.status.code(), Some(0));
    assert_eq!(flag.stdout, env.stdout);
    assert_ne!(flag.stdout, other.stdout);
    assert_eq!(
        run(&["sample", "--seed", "8", "--max-points", "6"], None).stdout,
        other.stdout
    );
}

#[test]
fn flow_writes_csv() {
    let o = run(
        &["model", "flow", "--field", "D", "--start", "0.5,0.2", "--T", "0.01"],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,y,F"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(first[..3], [0.0, 0.5, 0.2]);
    assert_eq!(lines.count(), 10);
}

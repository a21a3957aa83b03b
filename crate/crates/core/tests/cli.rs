//! Exit codes and output formats of the command-line tool.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn model(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(format!("{name}.json"))
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_collapse-lab")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_spec(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn parse_and_precondition_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_spec(
        dir.path(),
        "u.json",
        r#"{"schema_version":1,"seed":1,"builder":"sphere","params":{}}"#,
    );
    assert_eq!(code(&run(&["build", "--model", &unknown])), 2);
    let garbage = write_spec(dir.path(), "g.json", "{ not json");
    assert_eq!(code(&run(&["build", "--model", &garbage])), 2);
    let negative = write_spec(
        dir.path(),
        "n.json",
        r#"{"schema_version":1,"seed":1,"builder":"torus","params":{"g_base":0,"g_fiber":1,"cutoff":-1}}"#,
    );
    let o = run(&["build", "--model", &negative]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cutoff"));
    assert_eq!(code(&run(&["audit", "--model", &model("torus_circle"), "--samples", "0"])), 3);
}

#[test]
fn minimal_torus_has_six_dimensions() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        dir.path(),
        "t.json",
        r#"{"schema_version":1,"seed":1,"builder":"torus","params":{"g_base":0,"g_fiber":1,"cutoff":1}}"#,
    );
    let o = run(&["build", "--model", &spec]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["hilbert_dim"], 6);
}

#[test]
fn sweep_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cb.csv");
    let o = run(&["sweep", "--model", &model("circle_bundle"), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("eps,sector,track_index,eigenvalue"));
    let mut per_track = std::collections::BTreeMap::new();
    for l in lines {
        let cells: Vec<&str> = l.split(',').collect();
        *per_track.entry((cells[1].to_string(), cells[2].to_string())).or_insert(0) += 1;
    }
    assert!(!per_track.is_empty());
    assert!(per_track.values().all(|&n| n == 13));
    let summary = std::fs::read_to_string(dir.path().join("cb.summary.csv")).unwrap();
    assert_eq!(summary.lines().next(), Some("eps,hausdorff,bound"));
    assert_eq!(summary.lines().count(), 14);

    let single = dir.path().join("one.csv");
    let o = run(&["sweep", "--model", &model("circle_bundle"), "--eps-grid", "1", "--out", single.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(&single).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.starts_with("1,")));

    let o = run(&["sweep", "--model", &model("circle_bundle"), "--window", "50", "--out", single.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
}

#[test]
fn flat_four_torus_sweep_decouples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t4.csv");
    let o = run(&["sweep", "--model", &model("torus_4d"), "--window", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let summary = std::fs::read_to_string(dir.path().join("t4.summary.csv")).unwrap();
    let last = summary.lines().last().unwrap();
    let h: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
    assert!(h <= 1e-9);
}

#[test]
fn audit_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.json");
    let o = run(&["audit", "--model", &model("torus_circle"), "--samples", "100"]);
    assert_eq!(code(&o), 0);
    let o = run(&["audit", "--model", &model("adversarial_crossed"), "--samples", "50", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 5);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let failed: Vec<u64> = v["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|x| x["pass"] == false)
        .map(|x| x["hypothesis"].as_u64().unwrap())
        .collect();
    assert_eq!(failed, vec![3]);
}

#[test]
fn distance_tables_are_tagged() {
    let o = run(&["distance", "--model", &model("point_collapse"), "--states", "0:1,1:1"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0][2], "1");
    assert_eq!(rows[0][3], "exact-shortest-path");
    assert_eq!(rows[1][2], "0");

    let o = run(&["distance", "--model", &model("point_collapse"), "--states", "0:1", "--oracle"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3], "oracle");
    assert!((row[2].parse::<f64>().unwrap() - 1.0).abs() <= 1e-6 + row[4].parse::<f64>().unwrap());

    let o = run(&["distance", "--model", &model("torus_1_1"), "--states", "haar:2", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.contains("ascent-lower-bound")));

    let o = run(&["distance", "--model", &model("torus_1_1"), "--states", "0:1", "--oracle"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn report_bundle_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&[
        "report",
        "--model",
        &model("torus_circle"),
        "--samples",
        "50",
        "--seed",
        "11",
        "--states",
        "0:1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["metadata"]["seed"], 11);
    assert_eq!(v["metadata"]["model_hash"].as_str().unwrap().len(), 64);
    assert!(v["tolerances"]["kernel_tol"].is_number());
    assert_eq!(v["sweep"]["curves"].as_array().unwrap().len(), 13);
    assert_eq!(v["audit"]["all_pass"], true);
    assert_eq!(v["distances"].as_array().unwrap().len(), 1);
}

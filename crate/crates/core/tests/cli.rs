//! End-to-end runs of the command-line tool.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_buyer-privacy"))
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

/// Every file in `dir`, with timing fields removed from JSON files.
fn snapshot(dir: &Path) -> BTreeMap<String, String> {
    fn strip(v: &mut Value) {
        match v {
            Value::Object(m) => {
                m.retain(|k, _| !k.contains("seconds") && !k.starts_with("elapsed"));
                m.values_mut().for_each(strip);
            }
            Value::Array(a) => a.iter_mut().for_each(strip),
            _ => {}
        }
    }
    let mut files = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let mut bytes = fs::read(&path).unwrap();
        if path.extension().is_some_and(|e| e == "json") {
            let mut v: Value = serde_json::from_slice(&bytes).unwrap();
            strip(&mut v);
            bytes = serde_json::to_vec(&v).unwrap();
        }
        files.insert(
            path.file_name().unwrap().to_string_lossy().into_owned(),
            String::from_utf8(bytes).unwrap(),
        );
    }
    files
}

fn twice(args: &[&str]) -> BTreeMap<String, String> {
    let tmp = tempfile::tempdir().unwrap();
    let outs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let dir = tmp.path().join(name);
            let mut full: Vec<&str> = args.to_vec();
            let d = dir.to_str().unwrap().to_string();
            full.extend(["--out", &d]);
            run(&full);
            snapshot(&dir)
        })
        .collect();
    assert_eq!(outs[0], outs[1], "{args:?} is not deterministic");
    outs.into_iter().next().unwrap()
}

#[test]
fn expand_writes_a_private_intent() {
    let files = twice(&["expand", "--intent", "ti2", "--attack", "em-fc", "--alpha", "0.6"]);
    for f in ["published_intent.json", "trace.csv", "report.csv", "summary.json"] {
        assert!(files.contains_key(f), "missing {f}");
    }
    let report = files["report.csv"].clone();
    assert!(report.contains("em-fc"));
    let summary: Value = serde_json::from_str(&files["summary.json"]).unwrap();
    assert!(summary.to_string().contains("0.3"));
}

#[test]
fn allocate_then_attack_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let alloc = tmp.path().join("alloc");
    run(&[
        "allocate", "--method", "gmcmc", "--q", "61", "--epsilon", "0.07",
        "--out", alloc.to_str().unwrap(),
    ]);
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(alloc.join("summary.json")).unwrap()).unwrap();
    assert!(summary["confidence_upper_bound"].as_f64().unwrap() <= 0.3 + 1e-9);
    assert_eq!(summary["q"], 61);

    let purchase = alloc.join("purchase.csv");
    let files = twice(&[
        "attack", "--purchased", purchase.to_str().unwrap(), "--exact",
    ]);
    assert!(files.contains_key("assessment.csv"));
    let rows: Value = serde_json::from_str(&files["assessment.json"]).unwrap();
    assert!(!rows.as_array().unwrap().is_empty());
}

#[test]
fn allocation_is_reproducible_per_seed() {
    for method in ["mc", "mcmc", "gmcmc", "genetic"] {
        let files = twice(&["allocate", "--method", method, "--q", "61", "--Z", "2000", "--seed", "4"]);
        assert!(files.contains_key("purchase.csv"));
        assert!(files.contains_key("feasibility.csv"));
    }
}

#[test]
fn synth_project_sweep_reproduce_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let synth: Vec<Vec<u8>> = ["a.csv", "b.csv"]
        .iter()
        .map(|f| {
            let path = tmp.path().join(f);
            run(&["synth", "--seed", "9", "--out", path.to_str().unwrap()]);
            fs::read(path).unwrap()
        })
        .collect();
    assert_eq!(synth[0], synth[1]);
    let p = twice(&["project", "--intent", "ti2", "--alpha", "1.0", "--drop", "age"]);
    let text = p["projection.csv"].clone();
    assert_eq!(text.lines().count(), 2);
    twice(&["sweep", "--param", "lambda", "--grid", "0.1,0.3,1.0"]);
    twice(&["reproduce", "--table", "1"]);
    twice(&["reproduce", "--table", "3", "--settings", "adult-ti1", "--repeats", "2", "--Z", "500"]);
}

#[test]
fn synthetic_data_feeds_back_through_a_csv_path() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("d.csv");
    let schema = tmp.path().join("schema.json");
    run(&[
        "synth", "--out", data.to_str().unwrap(), "--schema-out", schema.to_str().unwrap(),
    ]);
    let out = tmp.path().join("x");
    run(&[
        "expand", "--dataset", data.to_str().unwrap(), "--schema", schema.to_str().unwrap(),
        "--attack", "em-f", "--out", out.to_str().unwrap(),
    ]);
    assert!(out.join("published_intent.json").exists());
}

#[test]
fn errors_are_json_with_a_nonzero_exit() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["expand", "--lambda", "0.001", "--out", tmp.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["kind"], "infeasible");

    let out = bin()
        .args(["expand", "--intent", "/nonexistent.json", "--out", tmp.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["kind"], "io");

    let out = bin().args(["reproduce", "--table", "7", "--out", "x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

mod common;

use std::path::PathBuf;

use common::*;
use ehupm::cli::run_with;
use serde_json::Value;

fn example() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/data/running_example.lp").to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(std::iter::once("ehupm").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ehupm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn json_output_is_byte_stable_across_thread_counts() {
    let ex = example();
    let base = [
        "mine", ex.as_str(), "--utility", "vfirst:max(obj.0, obj.1):sum", "--size", "1..3",
        "--format", "json", "--no-timing",
    ];
    let (c1, a, _) = run(&[&base[..], &["--threads", "1"]].concat());
    let (c2, b, _) = run(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let doc: Value = serde_json::from_str(&a).unwrap();
    assert!(doc["diagnostics"].get("timing_ms").is_none());
    assert_eq!(doc["command"], "mine");
    assert!(doc["config"].get("threads").is_none());
    assert!(!doc["rows"].as_array().unwrap().is_empty());
}

#[test]
fn empty_result_is_success() {
    let ex = example();
    let (code, out, _) = run(&["mine", &ex, "--utility", "hfirst:filter(obj.0):max", "--min-occ", "50", "--format", "json"]);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 0);
}

#[test]
fn argument_and_data_errors() {
    let ex = example();
    assert_eq!(run(&["mine", &ex, "--utility", "hfirst:filter(obj.0):max", "--no-such-flag"]).0, 1);
    assert_eq!(run(&["mine", &ex]).0, 1);
    assert_eq!(run(&["mine", &ex, "--utility", "hfirst:filter(obj.0):max", "--size", "3..1"]).0, 1);
    assert_eq!(run(&["mine", &ex, "--utility", "hfirst:filter(obj.0):max", "--mask", "cover:noun"]).0, 1);
    assert_eq!(run(&["cv", &ex, "--object-facet", "nonexistent"]).0, 1);
    let broken = temp("broken.lp", "container(c).\nobject(o c).\n");
    let (code, _, err) = run(&["stats", broken.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"));
    let dangling = temp("dangling.lp", "container(c). object(o, c). transaction(t, nowhere).\n");
    assert_eq!(run(&["stats", dangling.to_str().unwrap()]).0, 2);
}

#[test]
fn help_documents_every_flag() {
    let (code, out, _) = run(&["mine", "--help"]);
    assert_eq!(code, 0);
    for flag in ["--min-occ", "--min-util", "--size", "--mode", "--contiguous", "--filter", "--utility", "--mask", "--threads", "--format", "--seed", "--rename", "--out", "--no-timing"] {
        assert!(out.contains(flag), "{flag} missing from help");
    }
}

#[test]
fn renamed_predicates_load() {
    let text = include_str!("../data/running_example.lp").replace("transactionUtilityVector", "sentenceScores");
    let path = temp("renamed.lp", &text);
    let p = path.to_str().unwrap();
    assert_eq!(run(&["stats", p]).0, 2);
    let (code, out, _) = run(&["stats", p, "--rename", "sentenceScores=transactionUtilityVector", "--format", "json"]);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["dataset"]["facet_dims"]["transaction"], 8);
}

#[test]
fn sweep_plot_data() {
    let path = temp("clinical.lp", &clinical(&mut rng(2), 25, 2, 0.5));
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["sweep", p, "--min-occ", "3,5", "--pearson", "0.5,0.9", "--max-len", "2", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "min_occ,threshold,metric,value");
    // 2 x 2 cells, 5 metrics each
    assert_eq!(lines.len(), 1 + 4 * 5);
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        let v: f64 = fields[3].parse().unwrap();
        if fields[2].ends_with("coverage") {
            assert!((0.0..=1.0).contains(&v));
        }
    }
    let (code, out, _) = run(&["sweep", p, "--min-occ", "3", "--pearson", "0.5..0.7:0.1", "--no-cv", "--max-len", "2", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1 + 3 * 2);
}

#[test]
fn saved_predictors_reload() {
    let data = temp("clinical2.lp", &clinical(&mut rng(4), 25, 2, 0.5));
    let model = std::env::temp_dir().join(format!("ehupm-cli-{}", std::process::id())).join("model.tsv");
    let (d, m) = (data.to_str().unwrap(), model.to_str().unwrap());
    let common = ["--min-occ", "3", "--max-len", "2", "--format", "json", "--no-timing"];
    let (code, fitted, _) = run(&[&["predict", d, "--save", m][..], &common[..]].concat());
    assert_eq!(code, 0);
    let (code, loaded, _) = run(&[&["predict", d, "--load", m][..], &common[..]].concat());
    assert_eq!(code, 0);
    let a: Value = serde_json::from_str(&fitted).unwrap();
    let b: Value = serde_json::from_str(&loaded).unwrap();
    assert_eq!(a["rows"], b["rows"]);
    let (code, _, _) = run(&["coverage", d, "--load", m, "--format", "json"]);
    assert_eq!(code, 0);
}

#[test]
fn stats_of_running_example() {
    let (code, out, _) = run(&["stats", &example(), "--format", "json"]);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["dataset"]["containers"], 2);
    assert_eq!(doc["dataset"]["objects"], 3);
    assert_eq!(doc["dataset"]["transactions"], 4);
    assert_eq!(doc["rows"][1]["label"], "clarity");
}

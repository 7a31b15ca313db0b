use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn properize(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_properize")).args(args).output().expect("binary runs")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("properize-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn binary_dataset() {
    let input = scratch(
        "binary.jsonl",
        r#"{"id":"a","forecast":{"type":"bernoulli","p":0.7},"observation":1}
{"id":"b","forecast":{"type":"bernoulli","p":0.2},"observation":0}
{"id":"c","forecast":{"type":"bernoulli","p":0.4},"observation":1}
"#,
    );
    let out = properize(&["score", "--rule", "mae_binary", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert!((r["mean_raw"].as_f64().unwrap() - 1.1 / 3.0).abs() < 1e-12);
    assert!((r["mean_properized"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(r["per_case"][2]["properized"], json!(1.0));
}

#[test]
fn empty_dataset() {
    let input = scratch("empty.jsonl", "");
    let out = properize(&["score", "--rule", "brier", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["n_cases"], 0);
}

#[test]
fn degenerate_case_exit_code() {
    let input = scratch(
        "nse.jsonl",
        r#"{"id":"a","forecast":{"type":"gaussian","mu":0,"sigma2":1},"observation":0.5}
{"id":"b","forecast":{"type":"dirac","x":0},"observation":0.5}
"#,
    );
    let out = properize(&[
        "score",
        "--rule",
        "normalized_squared_error",
        "--family",
        "p2m:3",
        "--input",
        input.to_str().unwrap(),
        "--format",
        "table",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("degenerate"), "{text}");
    assert!(text.contains("errors: 1"));
}

#[test]
fn csv_input_and_output_file() {
    let input = scratch("flat.csv", "id,mu,sigma2,obs\nx,0,1,0.3\ny,2,4,1\n");
    let output = input.with_extension("json");
    let out = properize(&[
        "score",
        "--rule",
        "pmcc",
        "--input",
        input.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert!((r["per_case"][0]["properized"].as_f64().unwrap() - 0.09).abs() < 1e-12);
    assert!((r["per_case"][1]["raw"].as_f64().unwrap() - 5.0).abs() < 1e-12);
}

#[test]
fn unreadable_input() {
    let out = properize(&["score", "--rule", "brier", "--input", "/nonexistent/cases.jsonl"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_rule_is_a_usage_error() {
    let input = scratch("one.jsonl", "");
    let out = properize(&["score", "--rule", "nonsense", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bayes_act_of_pmcc_is_a_point_mass() {
    let out = properize(&["bayes-act", "--rule", "pmcc", "--forecast", r#"{"type":"gaussian","mu":1,"sigma2":4}"#]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), json!({"type": "dirac", "x": 1.0}));
}

#[test]
fn bayes_act_of_quadratic_crps_echoes_the_forecast() {
    let f = r#"{"type":"grid_cdf","grid":[0,1,2],"cdf":[0,0.4,1]}"#;
    let out = properize(&["bayes-act", "--rule", "crps_alpha:2", "--forecast", f, "--family", "p1"]);
    assert_eq!(out.status.code(), Some(0));
    let echoed: Value = serde_json::from_str(f).unwrap();
    let got = stdout_json(&out);
    assert_eq!(got["type"], "grid_cdf");
    assert_eq!(got["cdf"].as_array().unwrap().len(), 3);
    for (a, b) in got["cdf"].as_array().unwrap().iter().zip(echoed["cdf"].as_array().unwrap()) {
        assert_eq!(a.as_f64(), b.as_f64());
    }
}

#[test]
fn linear_score_has_no_bayes_act() {
    let out = properize(&[
        "bayes-act",
        "--rule",
        "linear_score",
        "--forecast",
        r#"{"type":"gaussian","mu":0,"sigma2":1}"#,
        "--family",
        "p1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let r = stdout_json(&out);
    assert_eq!(r["outcome"], "no_bayes_act");
}

#[test]
fn verify_suites() {
    let out = properize(&["verify", "--suite", "no-such-suite"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("improper"));

    let out = properize(&["verify", "--suite", "paper-improper", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = stdout_json(&out);
    assert_eq!(r["all_as_expected"], true);
    for o in r["outcomes"].as_array().unwrap() {
        assert_eq!(o["verdict"]["status"], "violated");
    }

    let out = properize(&["verify", "--suite", "properized", "--pairs", "10", "--format", "table"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("no counterexample found"));
}

#[test]
fn too_few_pairs_miss_violations() {
    let out = properize(&["verify", "--suite", "improper", "--pairs", "1"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(stdout_json(&out)["all_as_expected"], false);
}

#[test]
fn negative_tolerance_is_rejected() {
    let out = properize(&["verify", "--suite", "properized", "--pairs", "5", "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(1));
}

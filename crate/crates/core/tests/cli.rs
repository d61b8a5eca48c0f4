use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_chi2qec"));
    c.env_remove("CHI2QEC_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn chi2qec")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_of(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = run(&all);
    let v = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", stdout(&o)));
    (o.status.code().unwrap(), v)
}

fn validator() -> jsonschema::Validator {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(v: &Value) {
    let errs: Vec<String> = validator().iter_errors(v).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errs.is_empty(), "{}: {errs:#?}", v["command"]);
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn kl_check_lowest_order_example() {
    let o = run(&["kl-check", "pcc", "--N", "2", "--errors", "lowest-order", "--gamma", "0.01"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("alpha[E_0][E_0] = 0.970000000000"), "{s}");
    assert!(s.contains("alpha[E_s1][E_s1] = 0.005000000000"), "{s}");
    assert!(s.ends_with("result: pass\n"));
}

#[test]
fn synth_prints_eecc_codewords() {
    let o = run(&["synth", "eecc", "--N", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("|0~> = +0.707107|0,0,2> +0.707107|2,2,0>"), "{s}");
    assert!(s.contains("|1~> = +1.000000|1,1,1>"), "{s}");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["synth", "nosuchcode"]).status.code(), Some(2));
    assert_eq!(run(&["kl-check", "pcc", "--errors", "xi"]).status.code(), Some(2));
    assert_eq!(run(&["kl-check", "pcc", "--errors", "ad"]).status.code(), Some(2));
    assert_eq!(run(&["synth", "pcc", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(run(&["recover", "pcc", "--N", "3", "--error", "a_x9"]).status.code(), Some(2));
    assert_eq!(run(&["--tol", "-1", "gates", "verify"]).status.code(), Some(2));
    assert_eq!(run(&["kl-check", "bc2mode", "--errors", "ad", "--gamma", "0.01"]).status.code(), Some(1));
    assert_eq!(run(&["synth", "pcc", "--N", "3"]).status.code(), Some(1));
    assert_eq!(run(&["bounds", "rotation", "--q", "3", "--b", "2"]).status.code(), Some(0));
    assert_eq!(run(&["bounds", "rotation", "--n", "3", "--q", "3", "--b", "2"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn failure_reports_name_the_offending_element() {
    let o = run(&["kl-check", "bc2mode", "--N", "2", "--errors", "ad", "--gamma", "0.01"]);
    let s = stdout(&o);
    assert!(s.contains("worst element <"), "{s}");
    assert!(s.contains("residual 1.4701"), "{s}");
}

#[test]
fn every_report_kind_validates() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["synth", "eecc", "--N", "2"],
        vec!["kl-check", "pcc", "--N", "2", "--errors", "lowest-order", "--gamma", "0.01"],
        vec!["kl-check", "bc", "--N", "2", "--errors", "xi2:loss"],
        vec!["kl-check", "bc2mode", "--N", "2", "--errors", "ad"],
        vec!["syndromes", "pcc", "--N", "3"],
        vec!["syndromes", "bc", "--N", "2", "--order", "2", "--p", "1,1,0", "--q", "7"],
        vec!["syndromes", "eecc", "--N", "2", "--p", "0,0,0", "--q", "1"],
        vec!["recover", "eecc", "--N", "2", "--trials", "5"],
        vec!["gates", "verify"],
        vec!["bounds", "theorems", "--max-q", "6", "--max-b", "6", "--max-k", "3"],
        vec!["bounds", "loss", "--sweep", "--max-q", "4", "--max-b", "4", "--max-k", "2"],
        vec!["bounds", "rotation", "--n", "5"],
        vec!["report", "all", "--criterion", "5"],
    ];
    for args in cases {
        let (_, v) = json_of(&args);
        assert_valid(&v);
    }
}

#[test]
fn schema_rejects_malformed_reports() {
    let (_, v) = json_of(&["gates", "verify"]);
    let mut bad = v.clone();
    bad["config"]["format"] = "xml".into();
    assert!(!validator().is_valid(&bad));
    let mut bad = v.clone();
    bad["results"]["checks"][0]["passed"] = "yes".into();
    assert!(!validator().is_valid(&bad));
    let mut bad = v;
    bad.as_object_mut().unwrap().remove("passed");
    assert!(!validator().is_valid(&bad));
}

#[test]
fn decode_through_cli() {
    let (code, v) = json_of(&["syndromes", "bc", "--N", "2", "--order", "2", "--p", "1,1,0", "--q", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["decoded"]["hypothesis"], "a_s^2");
    let (code, v) = json_of(&["syndromes", "eecc", "--N", "2", "--p", "1,1,1", "--q", "0"]);
    assert_eq!(code, 1);
    assert!(v["results"]["decoded"]["hypothesis"].is_null());
}

#[test]
fn report_all_verdicts() {
    let (code, v) = json_of(&["report", "all"]);
    assert_valid(&v);
    assert_eq!(code, 1);
    let verdicts: Vec<(u64, bool)> = v["results"]["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["id"].as_u64().unwrap(), c["passed"].as_bool().unwrap()))
        .collect();
    let expect: Vec<(u64, bool)> =
        vec![(1, true), (2, false), (3, true), (4, false), (5, true), (6, true), (7, false), (8, false), (9, true)];
    assert_eq!(verdicts, expect);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["recover", "pcc", "--N", "3", "--trials", "20", "--seed", "11", "--format", "json"];
    let one = bin().env("CHI2QEC_THREADS", "1").args(args).output().unwrap();
    let four = bin().env("CHI2QEC_THREADS", "4").args(args).output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let again = run(&args);
    assert_eq!(one.stdout, again.stdout);
    let other = run(&["recover", "pcc", "--N", "3", "--trials", "20", "--seed", "12", "--format", "json"]);
    assert_ne!(one.stdout, other.stdout);
}

#[test]
fn bad_thread_env_is_a_usage_error() {
    let o = bin().env("CHI2QEC_THREADS", "many").args(["gates", "verify"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let cfg = scratch("run.toml");
    std::fs::write(&cfg, "# test run\nformat = \"json\"\nseed = 5\ntrials = 3\n").unwrap();
    let cfg_s = cfg.to_str().unwrap();
    let o = run(&["--config", cfg_s, "recover", "eecc", "--error", "a_s"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 5);
    assert_eq!(v["results"]["summaries"][0]["trials"], 3);
    let o = run(&["--config", cfg_s, "recover", "eecc", "--error", "a_s", "--format", "csv", "--seed", "9"]);
    let s = stdout(&o);
    assert!(s.starts_with("code,error,pipeline,trials,seed,min_fidelity,mean_fidelity,passed\n"), "{s}");
    assert!(s.contains(",3,9,"), "{s}");
    std::fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    assert_eq!(run(&["--config", cfg_s, "gates", "verify"]).status.code(), Some(2));
}

#[test]
fn report_written_to_file() {
    let out = scratch("syndromes.csv");
    let o = run(&["syndromes", "eecc", "--N", "2", "--format", "csv", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let s = std::fs::read_to_string(&out).unwrap();
    assert_eq!(s.lines().next(), Some("error_label,p,q"));
    assert_eq!(s.lines().nth(1), Some("a_s,\"(1,1,0)\",\"(2)\""));
}

#[test]
fn sweep_csv_columns() {
    let o = run(&["bounds", "rotation", "--sweep", "--max-q", "3", "--max-b", "3", "--max-k", "1", "--format", "csv"]);
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "q,b,k,t,min_n,rate");
    assert_eq!(lines.len(), 5);
    assert!(lines.contains(&"3,2,1,1,4,0.157732"), "{s}");
}

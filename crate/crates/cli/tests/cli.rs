use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn rgdiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rgdiff"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn schema() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = rgdiff(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_valid(&v);
    v
}

fn assert_valid(v: &Value) {
    let validator = schema();
    let errors: Vec<String> = validator.iter_errors(v).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}\n{v:#}");
}

#[test]
fn decompose_single_variable() {
    let out = rgdiff(&["decompose", &data("zero.txt")]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("system 1:\n  A: y1\n"), "{text}");
    assert!(!text.contains("system 2"));
    assert!(text.contains("<= bound 0: PASS"), "{text}");

    let v = json(&["decompose", &data("zero.txt")]);
    assert_eq!(v["systems"].as_array().unwrap().len(), 1);
    assert_eq!(v["systems"][0]["weight"], 0);
    assert_eq!(v["output_bound"]["pass"], true);
}

#[test]
fn decompose_square_root_example() {
    let v = json(&["decompose", &data("sqrt.txt")]);
    let systems = v["systems"].as_array().unwrap();
    assert_eq!(systems.len(), 2);
    assert_eq!(systems[0]["a"][0], "y1[1]^2 - 4*y1");
    assert_eq!(systems[1]["a"][0], "y1");
    assert_eq!(v["h"], 1);
    assert_eq!(v["weight_equals_order"], true);
    assert_eq!(v["quadruple_bound"]["pass"], true);
    assert_eq!(v["output_bound"]["pass"], true);
}

#[test]
fn inconsistent_system_exits_zero_with_marker() {
    let out = rgdiff(&["decompose", &data("inconsistent.txt")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("INCONSISTENT\n"));
    let v = json(&["decompose", &data("inconsistent.txt")]);
    assert_eq!(v["inconsistent"], true);
    assert!(v["systems"].as_array().unwrap().is_empty());
}

#[test]
fn budget_exhaustion_has_its_own_exit_code() {
    let out = rgdiff(&["decompose", &data("runaway.txt"), "--budget", "50"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn engine_errors_exit_one() {
    let out = rgdiff(&["decompose", &data("malformed.txt")]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
    assert_eq!(rgdiff(&["decompose", &data("missing.txt")]).status.code(), Some(1));
}

#[test]
fn trace_file_is_schema_valid() {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("sqrt-trace.json");
    let out = rgdiff(&["decompose", &data("sqrt.txt"), "--trace", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_valid(&v);
    let quads = v["quadruples"].as_array().unwrap();
    assert_eq!(quads[0]["rule"], "input");
    assert!(quads[1..].iter().all(|q| q["parent"].is_u64()));
}

#[test]
fn parallel_decomposition_matches() {
    let seq = json(&["decompose", &data("sqrt.txt")]);
    let par = json(&["decompose", &data("sqrt.txt"), "--parallel"]);
    assert_eq!(seq["systems"], par["systems"]);
}

#[test]
fn bounds_m2_h5() {
    let out = rgdiff(&["bounds", "m=2", "n=1", "h=5", "w=[1,1]"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("weight bound: 53\n"), "{text}");
    assert!(text.contains("published table lists weight 55"), "{text}");

    let v = json(&["bounds", "m=2", "n=1", "h=5", "w=[2,1]"]);
    assert_eq!(v["length"], 6);
    assert_eq!(v["weight_bound"], "53");
    assert_eq!(v["per_derivation"], serde_json::json!(["26", "53"]));
    assert_eq!(v["weight_equals_order"], Value::Null);
}

#[test]
fn bounds_from_file_report_weight_order_flag() {
    let v = json(&["bounds", "--file", &data("heat.txt")]);
    assert_eq!(v["h"], 2);
    assert_eq!(v["weight_equals_order"], true);
    assert_eq!(v["length"], 10);
    assert_eq!(v["weight_bound"], "178");
    assert_eq!(v["per_derivation"], serde_json::json!(["178", "178", "89"]));
}

#[test]
fn bounds_rejects_bad_parameters() {
    assert_eq!(rgdiff(&["bounds", "m=2", "n=1"]).status.code(), Some(1));
    assert_eq!(rgdiff(&["bounds", "m=2", "n=1", "h=1", "w=[1]"]).status.code(), Some(1));
    assert_eq!(rgdiff(&["bounds", "q=1"]).status.code(), Some(1));
}

#[test]
fn tables_match_golden_files() {
    let golden = |name: &str| {
        std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
    };
    let out = rgdiff(&["tables"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), golden("tables.txt"));
    let out = rgdiff(&["--json", "tables"]);
    assert_eq!(stdout(&out), golden("tables.json"));
    assert_valid(&serde_json::from_str(&stdout(&out)).unwrap());
}

#[test]
fn golden_tables_carry_the_published_values() {
    let v = json(&["tables"]);
    let weights: Vec<&str> = v["m2_n1"].as_array().unwrap().iter().map(|c| c["weight"].as_str().unwrap()).collect();
    assert_eq!(weights, ["1", "4", "11", "25", "53", "106", "205", "386", "713", "1297"]);
    let m2: Vec<(u64, &str)> = v["m2"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["length"].as_u64().unwrap(), r["weight"].as_str().unwrap()))
        .collect();
    assert_eq!(&m2[..4], &[(5, "4"), (9, "77"), (18, "9960"), (34, "31206974")]);
    assert!(v["m2"][4]["note"].as_str().unwrap().contains("discrepancy"));
    let general: Vec<&str> = v["general"].as_array().unwrap().iter().map(|r| r["weight"].as_str().unwrap()).collect();
    assert_eq!(general, ["3", "178", "8", "10946"]);
}

#[test]
fn reduce_prints_verified_certificates() {
    let v = json(&["reduce", &data("exp.txt"), "y1[2]"]);
    assert_eq!(v["mode"], "full");
    assert_eq!(v["remainder"], "y1");
    assert_eq!(v["verified"], true);
    let v = json(&["reduce", &data("exp.txt"), "y1[2]", "--partial"]);
    assert_eq!(v["remainder"], "y1[1]");
    assert_eq!(v["multiplier"][0]["kind"], "separant");
    let out = rgdiff(&["reduce", &data("exp.txt"), "y1[3]*y1 - 2"]);
    assert!(stdout(&out).contains("certificate verified: yes"));
}

#[test]
fn member_answers() {
    let v = json(&["member", &data("exp.txt"), "y1[3] - y1"]);
    assert_eq!(v["answer"], "yes");
    assert_eq!(v["weight_equals_order"], true);
    let v = json(&["member", &data("sqrt.txt"), "y1[2] - 2"]);
    assert_eq!(v["answer"], "unknown");
    let out = rgdiff(&["member", &data("inconsistent.txt"), "y1[4]"]);
    assert_eq!(stdout(&out), "yes\nW = H: yes\n");
}

#[test]
fn linear_check_runs_seeded_and_explicit_systems() {
    let v = json(&["linear-check", "--seed", "3", "--count", "6"]);
    assert_eq!(v["failures"], 0);
    assert_eq!(v["checks"].as_array().unwrap().len(), 6);
    let v = json(&["linear-check", "--m", "2", "--system", "x1 - x2; x2^2"]);
    assert_eq!(v["checks"][0]["groebner"], serde_json::json!(["x2 - x1", "x1^2"]));
    assert_eq!(v["checks"][0]["passed"], true);
    assert_eq!(v["seed"], Value::Null);
}

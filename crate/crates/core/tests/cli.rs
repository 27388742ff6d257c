use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_birank"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("birank-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn constructed_edge_family_member_analyzes_as_ppt() {
    let path = scratch("edge4.json");
    let out = run(&["construct", "--family", "tura", "--N", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["result"]["birank"], serde_json::json!([5, 5]));
    assert_eq!(report["result"]["verdict"], "PPT");
    assert_eq!(report["tau"], 1e-9);
    assert_eq!(report["seed"], 20121);
}

#[test]
fn non_hermitian_input_exits_with_2() {
    let path = scratch("bad.json");
    std::fs::write(
        &path,
        r#"{"dims":[1,2],"matrix":[[[1,0],[0.5,0]],[[0,0],[1,0]]]}"#,
    )
    .unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_file_exits_with_2() {
    let path = scratch("garbage.json");
    std::fs::write(&path, "not a state").unwrap();
    assert_eq!(run(&["analyze", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "/nonexistent/state.json"]).status.code(), Some(2));
}

#[test]
fn unknown_family_exits_with_2() {
    let out = run(&["construct", "--family", "no-such-family"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn state_file_round_trip_is_byte_identical() {
    let first = run(&["construct", "--family", "example29", "--N", "5", "--k", "2"]);
    assert_eq!(first.status.code(), Some(0));
    let path = scratch("ex29.json");
    std::fs::write(&path, &first.stdout).unwrap();
    let again = birank::io::read_state_file(&path).unwrap();
    let text = birank::io::write_state(&again.state, again.meta.as_ref()).unwrap();
    assert_eq!(text.as_bytes(), &first.stdout[..]);
}

#[test]
fn output_is_deterministic() {
    let path = scratch("det.json");
    let out = run(&["construct", "--family", "lemma27", "--N", "4", "--k", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let a = run(&["edge", "--grid", "256", path.to_str().unwrap()]);
    let b = run(&["edge", "--grid", "256", path.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["construct", "--family", "lemma27", "--N", "4", "--k", "2"]);
    let b = run(&["construct", "--family", "lemma27", "--N", "4", "--k", "2"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn subtraction_at_threshold_lowers_the_birank() {
    let path = scratch("t22.json");
    let out = run(&["construct", "--family", "fixed", "--id", "table1-(3,3)", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let after = scratch("t22-after.json");
    let out = run(&[
        "subtract",
        "--vector",
        r#"{"a": [[1,0],[1,0]], "b": [[1,0],[1,0]]}"#,
        "--out",
        after.to_str().unwrap(),
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&run(&["analyze", after.to_str().unwrap()]));
    assert_eq!(report["result"]["birank"], serde_json::json!([2, 2]));
}

#[test]
fn vector_outside_the_range_is_rejected() {
    let path = scratch("t11.json");
    run(&["construct", "--family", "fixed", "--id", "table1-(2,2)", "--out", path.to_str().unwrap()]);
    let out = run(&[
        "subtract",
        "--vector",
        r#"{"a": [[1,0],[0,0]], "b": [[0,0],[1,0]]}"#,
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn length_of_a_table_row() {
    let path = scratch("t45.json");
    run(&["construct", "--family", "fixed", "--id", "table2-(4,5)", "--out", path.to_str().unwrap()]);
    let out = run(&["length", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["length"], 5);
}

#[test]
fn text_format_lists_fields() {
    let path = scratch("text.json");
    run(&["construct", "--family", "tura", "--N", "3", "--out", path.to_str().unwrap()]);
    let out = run(&["--format", "text", "analyze", path.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("birank: [4,4]"));
    assert!(text.contains("verdict: PPT"));
}

#[test]
fn verification_report_counts_checks() {
    let out = run(&["verify-paper", "--grid", "512"]);
    let report = json(&out);
    let passed = report["summary"]["passed"].as_u64().unwrap();
    let failed = report["summary"]["failed"].as_u64().unwrap();
    assert!(passed > 300);
    let failing: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    // The only failing check is the entanglement claim for the smallest
    // member of the edge family, which has a product decomposition.
    assert_eq!(failed as usize, failing.len());
    assert!(failing.iter().all(|n| n.contains("N=3")), "{failing:?}");
    assert_eq!(out.status.code(), Some(if failed == 0 { 0 } else { 1 }));
}

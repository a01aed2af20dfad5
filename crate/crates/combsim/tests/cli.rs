use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn combsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_combsim"))
        .args(args)
        .env_remove("COMBSIM_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON output")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn verify_square_from_shorthand() {
    let o = combsim(&[
        "verify", "--hankel", "[0,0,0/1/0,1,0]", "--cluster", "eq10", "--rotate", "3,4", "--schedule", "0.5,1,2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["pass"], true);
    assert_eq!(v["rotations"], serde_json::json!([3, 4]));
    assert_eq!(v["nullifiers"].as_array().unwrap().len(), 4);
    let exps: Vec<f64> = v["channel_exponents"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let dp = (5f64.sqrt() + 1.0) / 2.0;
    assert!((exps[0] + 2.0 * dp).abs() < 1e-6);
}

#[test]
fn parse_to_matrix_gives_twelve_by_twelve() {
    let o = combsim(&["parse", "[0_11/1/0_5,1,0_5]", "--to-matrix"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = json(&o);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.as_array().unwrap().len() == 12));
    assert_eq!(rows[0][11].as_f64(), Some(1.0));
    assert_eq!(rows[11][6].as_f64(), Some(1.0));
}

#[test]
fn parse_normalizes_text() {
    let o = combsim(&["--format", "text", "parse", "[0, 0,0 /1/0,0,0,0,0,0,0,0,0,0,0]"]);
    assert_eq!(o.status.code(), Some(2), "unequal sides");
    let o = combsim(&["parse", "--format", "text", "[0,0,0,0/1/0,0,0,0]"]);
    assert_eq!(stdout(&o), "[0_4/1/0_4]\n");
}

#[test]
fn verify_copies_cube() {
    let o = combsim(&["verify-copies", "--block", "cube", "--n", "2", "--schedule", "1,2,3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["pass"], true);
    assert_eq!(v["components"].as_array().unwrap().len(), 2);
    assert!(v["components"][0]["witness"].is_array());
}

#[test]
fn wrong_copy_count_is_an_input_error() {
    let o = combsim(&["verify-copies", "--block", "square", "--n", "2", "--hankel", "[0_11/1/0_5,1,0_5]"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.starts_with("combsim verify-copies: error:"), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn failing_verification_exits_one() {
    let o = combsim(&["verify", "--builtin", "g1", "--cluster", "eq10", "--rotate", "3,4"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["pass"], false);
}

#[test]
fn bad_inputs_exit_two() {
    for args in [
        vec!["verify", "--builtin", "g2", "--cluster", "eq10", "--schedule", "2,1,3"],
        vec!["verify", "--builtin", "g2", "--cluster", "nosuch"],
        vec!["verify", "--builtin", "g2", "--cluster", "eq10", "--rotate", "9"],
        vec!["verify", "--builtin", "g3", "--cluster", "eq10"],
        vec!["parse", "[1,2/3/4"],
        vec!["evolve", "--builtin", "g2", "--r", "-1"],
    ] {
        let o = combsim(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn reports_are_byte_identical() {
    let args = ["reduce-cube", "--schedule", "1,2,3"];
    let a = combsim(&args);
    let b = combsim(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["measurement"]["measured"], serde_json::json!([1, 5]));
    assert_eq!(v["measurement"]["grid"]["signs"].as_array().unwrap().len(), 7);
    assert!(stdout(&a).contains("e-1"));
}

#[test]
fn csv_report_columns() {
    let o = combsim(&["verify", "--builtin", "g2", "--cluster", "eq10", "--rotate", "3,4", "--format", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("r,nullifier_id,variance,normalized_variance,fitted_exponent")
    );
    assert_eq!(lines.count(), 12);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = combsim(&["verify-copies", "--block", "square", "--n", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["components"].as_array().unwrap().len(), 3);
}

#[test]
fn tolerance_env_is_applied() {
    let o = Command::new(env!("CARGO_BIN_EXE_combsim"))
        .args(["verify", "--builtin", "g2", "--cluster", "eq10", "--rotate", "3,4"])
        .env("COMBSIM_TOL", "exponent=5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["tolerances"]["exponent"].as_f64(), Some(5.0));
    let o = Command::new(env!("CARGO_BIN_EXE_combsim"))
        .args(["verify", "--builtin", "g2", "--cluster", "eq10", "--rotate", "3,4"])
        .env("COMBSIM_TOL", "garbage")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn build_and_spurious_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let g2 = write(dir.path(), "g2.json", r#"{"modes": 4, "pumps": [{"sum": 5}, {"sum": 7}]}"#);
    let o = combsim(&["build", "--config", &g2]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["shorthand"], "[0_3/1/0,1,0]");

    let five = write(
        dir.path(),
        "five.json",
        r#"{"modes": 5, "pumps": [{"sum": 5}, {"sum": 7}], "target": ["1", "2", "3", "4"]}"#,
    );
    let o = combsim(&["spurious", "--config", &five]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o), serde_json::json!([{"lower": "2", "higher": "5", "pump_sum": 7, "interaction": "unpolarized"}]));
    let o = combsim(&["spurious", "--config", &g2]);
    assert_eq!(o.status.code(), Some(0));

    let balanced = write(
        dir.path(),
        "balanced.json",
        r#"{"modes": 4, "polarized": true, "window": [1, 2], "pumps": [
            {"sum": 3, "interaction": "VHV"}, {"sum": 3, "interaction": "VVH"},
            {"sum": 3, "interaction": "VVV"}, {"sum": 3, "interaction": "HHH", "weight": -1}]}"#,
    );
    let o = combsim(&["build", "--config", &balanced]);
    let v = json(&o);
    assert_eq!(v["modes"], serde_json::json!(["1H", "1V", "2H", "2V"]));
    assert!(v["shorthand"].is_null());
    let o = combsim(&["verify", "--config", &balanced, "--cluster", "balanced", "--rotate", "3,4"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn matrix_files_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let j = write(dir.path(), "g.json", "[[0,0,0,1],[0,0,1,0],[0,1,0,1],[1,0,1,0]]");
    let c = write(dir.path(), "g.csv", "0,0,0,1\n0,0,1,0\n0,1,0,1\n1,0,1,0\n");
    for path in [&j, &c] {
        let o = combsim(&["verify", "--matrix", path, "--cluster", "eq10", "--rotate", "auto"]);
        assert_eq!(o.status.code(), Some(0), "{path}");
    }
    let bad = write(dir.path(), "bad.csv", "0,1\n1\n");
    assert_eq!(combsim(&["spectrum", "--matrix", &bad]).status.code(), Some(2));
}

#[test]
fn spectrum_and_evolve() {
    let o = combsim(&["spectrum", "--builtin", "g2"]);
    let v = json(&o);
    let eig: Vec<f64> = v["eigenvalues"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((eig[3] - (5f64.sqrt() + 1.0) / 2.0).abs() < 1e-12);
    assert_eq!(v["squeezed"].as_array().unwrap().len(), 4);

    let o = combsim(&["evolve", "--builtin", "cube", "--r", "1", "--measure", "1,5"]);
    let v = json(&o);
    assert_eq!(v["modes"], 6);
    assert!(v["min_uncertainty_eigenvalue"].as_f64().unwrap() > -1e-9);
}

//! Exit-code contract and artifacts of the `wmink` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn wmink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wmink"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

/// Atoms at ±1 with mass 1/√2; the lifted target is a square with unit masses.
const SQUARE: &str = r#"{
  "dimension": 1,
  "atoms": [
    {"x": [-1.0], "mass": 0.7071067811865476},
    {"x": [1.0], "mass": 0.7071067811865476}
  ],
  "weight": {"kind": "constant", "value": 1.0, "beta": 0.4}
}"#;

const PLANAR: &str = r#"{
  "dimension": 2,
  "atoms": [
    {"x": [0.0, 0.0], "mass": 1.0},
    {"x": [1.0, 0.2], "mass": 0.6},
    {"x": [-0.4, 1.1], "mass": 0.8},
    {"x": [-0.9, -0.7], "mass": 0.5},
    {"x": [0.6, -1.2], "mass": 0.9}
  ],
  "weight": {"kind": "gaussian"},
  "solver": {"tol": 1e-9}
}"#;

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn square_instance_solves_and_verifies() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write(tmp.path(), "square.json", SQUARE);
    let out = tmp.path().join("out");
    let o = wmink(&["solve", "--input", &input, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    for f in ["solution.json", "verification.json", "verification.csv", "solution.svg"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let v = json(&out.join("verification.json"));
    assert!(v["max_relative_error"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["passed"], Value::Bool(true));
    let s = json(&out.join("solution.json"));
    for h in s["solve_report"]["h"].as_array().unwrap() {
        assert!((h.as_f64().unwrap() - 0.5).abs() < 1e-8);
    }
    assert!(s["polytope"]["facets"][0]["vertex_indices"].is_array());
    assert!(s["u"]["pieces"].is_array());
    assert!(stdout(&o).contains("PASS"));

    let o = wmink(&["verify", "--input", out.join("solution.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write(tmp.path(), "planar.json", PLANAR);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        let o = wmink(&["solve", "--input", &input, "--out", dir.to_str().unwrap(), "--seed", "3"]);
        assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    }
    for f in ["solution.json", "verification.json", "body_vertices.csv", "u_graph.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert!(!a.join("solution.svg").exists());
}

#[test]
fn single_atom_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write(
        tmp.path(),
        "one.json",
        r#"{"dimension": 1, "atoms": [{"x": [0.5], "mass": 1.0}], "weight": {"kind": "gaussian"}}"#,
    );
    let out = tmp.path().join("out");
    let o = wmink(&["solve", "--input", &input, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("hyperplane"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn malformed_json_exits_2_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let input = write(tmp.path(), "bad.json", "{\n  \"dimension\": 1,\n  \"atoms\": [\n");
    let o = wmink(&["solve", "--input", &input, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
    assert!(!out.exists());

    let input = write(
        tmp.path(),
        "unknown.json",
        "{\n  \"dimension\": 1,\n  \"atoms\": [{\"x\": [0.0], \"mass\": 1.0}],\n  \"weight\": {\"kind\": \"gaussian\", \"sigma\": 2}\n}",
    );
    let o = wmink(&["solve", "--input", &input, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let e = stderr(&o);
    assert!(e.contains("line 4") && e.contains("weight") && e.contains("sigma"), "{e}");
    assert!(!out.exists());

    let input = write(
        tmp.path(),
        "negative.json",
        r#"{"dimension": 1, "atoms": [{"x": [0.0], "mass": -1.0}, {"x": [1.0], "mass": 1.0}], "weight": {"kind": "gaussian"}}"#,
    );
    let o = wmink(&["solve", "--input", &input, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("atom 0"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn unconverged_solve_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write(tmp.path(), "square.json", SQUARE);
    let out = tmp.path().join("out");
    let o = wmink(&["solve", "--input", &input, "--out", out.to_str().unwrap(), "--max-iters", "1"]);
    assert_eq!(code(&o), 3);
    let s = json(&out.join("solution.json"));
    assert_eq!(s["solve_report"]["converged"], Value::Bool(false));
    let v = json(&out.join("verification.json"));
    assert_eq!(v["passed"], Value::Bool(false));
}

#[test]
fn inadmissible_weight_is_rejected_before_solving() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write(tmp.path(), "square.json", SQUARE);
    let out = tmp.path().join("out");
    let o = wmink(&["solve", "--input", &input, "--out", out.to_str().unwrap(), "--beta", "2"]);
    assert_eq!(code(&o), 5);
    assert!(!out.exists());
}

#[test]
fn radial_demo_outcomes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("two");
    let o = wmink(&["radial-demo", "--a", "0.05", "--n", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("two solutions"));
    assert!(out.join("radial_r1.csv").exists() && out.join("radial_r2.csv").exists());
    let s = json(&out.join("radial_summary.json"));
    assert_eq!(s["roots"]["status"], "two");
    assert_eq!(s["solutions"], 2);
    assert_eq!(s["rhs"], "(1+|x|^2)^(-3/2)");
    assert_eq!(fs::read_to_string(out.join("radial_r1.csv")).unwrap().lines().count(), 201);

    let out = tmp.path().join("none");
    let o = wmink(&["radial-demo", "--a", "0.2", "--n", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("NoRoot"));

    let peak = format!("{:.17e}", (-0.5f64).exp() / (2.0 * std::f64::consts::PI));
    let out = tmp.path().join("double");
    let o = wmink(&["radial-demo", "--a", &peak, "--n", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("DoubleRoot"));

    let out = tmp.path().join("planar");
    let o = wmink(&["radial-demo", "--a", "0.01", "--n", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("two solutions"));
}

#[test]
fn admissibility_exit_codes() {
    let cases: [(&[&str], i32); 5] = [
        (&["--weight", "gaussian", "--beta", "0.25", "--dimension", "1"], 0),
        (&["--weight", "constant", "--value", "1", "--beta", "0.4"], 0),
        (&["--weight", "constant", "--value", "1", "--beta", "2"], 5),
        (&["--weight", "gaussian", "--beta", "0.6"], 5),
        (&["--weight", "radial-profile", "--profile", "0:1,2:0.5,4:0", "--beta", "0.2"], 0),
    ];
    for (args, expected) in cases {
        let mut full = vec!["admissibility"];
        full.extend_from_slice(args);
        let o = wmink(&full);
        assert_eq!(code(&o), expected, "{args:?}\n{}", stdout(&o));
        assert!(stdout(&o).trim_end().ends_with(if expected == 0 { "PASS" } else { "FAIL" }));
    }
    let tmp = tempfile::tempdir().unwrap();
    let input = write(
        tmp.path(),
        "w.json",
        r#"{"dimension": 2, "weight": {"kind": "gaussian", "beta": 0.1}}"#,
    );
    let o = wmink(&["admissibility", "--input", &input]);
    assert_eq!(code(&o), 0);
    let o = wmink(&["admissibility"]);
    assert_eq!(code(&o), 2);
}

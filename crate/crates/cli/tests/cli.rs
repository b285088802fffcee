use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deltadyn")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn logistic_mismatch_exits_one() {
    let o = run(&["solve", "--map", "logistic:4", "--x0", "1/3", "--steps", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(lines, ["n,closed,iterated,equal", "0,1/3,1/3,true", "1,8/9,8/9,true", "2,44/27,32/81,false"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("disagree"));
}

#[test]
fn linear_maps_agree() {
    let o = run(&["solve", "--map", "2*x", "--x0", "1", "--steps", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = json(&o)["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[5]["closed"], "32");
    assert!(rows.iter().all(|r| r["equal"] == true));

    let o = run(&["solve", "--map", "x+1", "--x0", "1/5", "--steps", "3", "--mode", "closed"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("3,16/5"));
}

#[test]
fn gaussian_field() {
    let o = run(&["solve", "--map", "x^2+1/2", "--field", "Qi", "--x0", "0", "--steps", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("1,1/2,1/2,true"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["solve", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["basis", "--field", "R"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn bad_input_exits_one() {
    assert_eq!(run(&["solve", "--map", "x^^2", "--x0", "1"]).status.code(), Some(1));
    assert_eq!(run(&["basis", "--op", "nonsense"]).status.code(), Some(1));
}

#[test]
fn touchard_basis_is_stirling_two() {
    let o = run(&["basis", "--op", "touchard", "--depth", "4"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["basis"], "touchard");
    let rows: Vec<Vec<String>> = serde_json::from_value(v["coeffs"].clone()).unwrap();
    assert_eq!(rows[3], ["0", "1", "3", "1"]);
    assert_eq!(rows[4], ["0", "1", "7", "6", "1"]);

    let o = run(&["basis", "--op", "forward", "--depth", "3", "--format", "csv"]);
    assert_eq!(stdout(&o).lines().last(), Some("0,2,-3,1"));
}

#[test]
fn flow_prints_monomial_and_basic_forms() {
    let o = run(&["flow", "--gen", "x^2", "--op", "forward", "--order", "2"]);
    assert!(o.status.success());
    let v = json(&o);
    let forms = v.as_array().unwrap();
    assert_eq!(forms.len(), 2);
    assert_eq!(forms[0]["basis"], "monomial");
    // x + x² t + x³ (t² − t)
    assert_eq!(forms[0]["coeffs"][1], serde_json::json!(["0", "0", "1", "-1"]));
    assert_eq!(forms[1]["coeffs"][2], serde_json::json!(["0", "0", "0", "1"]));
    assert_eq!(run(&["flow", "--gen", "x", "--map", "x"]).status.code(), Some(2));
}

#[test]
fn exact_groups_pass_and_output_is_stable() {
    let a = run(&["verify", "--ops", "core,umbral"]);
    assert_eq!(a.status.code(), Some(0));
    let b = run(&["verify", "--ops", "core,umbral"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["seed"], 24301);
}

#[test]
fn full_suite_reports_nonlinear_failures() {
    let o = run(&["verify", "--order", "6", "--depth", "8"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|n| ["delta_ode_residual", "additivity", "forward_vs_iterate", "quadratic_map_vs_iterate"].contains(n)), "{failed:?}");
}

#[test]
fn numcheck_passes() {
    let o = run(&["numcheck"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["lambert_max_residual"].as_f64().unwrap() < 1e-12);
    let o = run(&["numcheck", "--depth", "3"]);
    assert_ne!(o.status.code(), Some(0));
}

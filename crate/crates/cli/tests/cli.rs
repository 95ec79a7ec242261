use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn hypermin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypermin")).args(args).output().expect("binary runs")
}

fn hypermin_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hypermin"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn factors(doc: &Value) -> Vec<(u64, u64)> {
    doc["disc"]["factors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| (f[0].as_u64().unwrap(), f[1].as_u64().unwrap()))
        .collect()
}

fn coeff_arg(doc: &Value, key: &str) -> String {
    doc[key].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect::<Vec<_>>().join(",")
}

const EXAMPLE: [&str; 6] = ["--genus", "2", "--q", "2288", "--p", "0,0,0,0,0,76765625"];

#[test]
fn minimize_example_curve() {
    let mut args = vec!["minimize"];
    args.extend(EXAMPLE);
    let doc = json_of(&hypermin(&args));
    assert_eq!(factors(&doc), vec![(2, 12), (5, 11), (11, 8), (13, 8), (17, 8)]);
    assert_eq!(doc["disc"]["cofactor"], "1");
    let reports = doc["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 5);
    assert_eq!(reports[0]["v_before"], 32);
    assert_eq!(reports[0]["v_after"], 12);
}

#[test]
fn minimize_output_round_trips() {
    let mut args = vec!["minimize"];
    args.extend(EXAMPLE);
    let doc = json_of(&hypermin(&args));
    let q = coeff_arg(&doc, "q");
    let p = coeff_arg(&doc, "p");
    let again = json_of(&hypermin(&["minimize", "--genus", "2", "--q", &q, "--p", &p]));
    assert_eq!(factors(&again), factors(&doc));
    assert_eq!(again["change"]["matrix"], serde_json::json!([["1", "0"], ["0", "1"]]));
    assert_eq!(again["change"]["e"], "1");
}

#[test]
fn disc_of_x3_plus_1() {
    let doc = json_of(&hypermin(&["disc", "--genus", "1", "--q", "", "--p", "1,0,0,1"]));
    assert_eq!(doc["disc"]["sign"], -1);
    assert_eq!(factors(&doc), vec![(2, 4), (3, 3)]);
}

#[test]
fn check_reports_minimal() {
    let doc = json_of(&hypermin(&["check", "--prime", "5", "--genus", "1", "--p", "1,0,0,1"]));
    assert_eq!(doc["status"], "minimal");
    let doc = json_of(&hypermin(&["check", "--prime", "5", "--genus", "1", "--p", "15625,0,0,1"]));
    assert_eq!(doc["status"], "not_minimal");
    assert!(doc.get("witness").is_some());
}

#[test]
fn pointed_minimize() {
    let doc = json_of(&hypermin(&["minimize", "--pointed", "--genus", "1", "--p", "15625,0,0,1"]));
    assert_eq!(coeff_arg(&doc, "p"), "1,0,0,1");
    assert_eq!(doc["change"]["u"], "5");
    let out = hypermin(&["minimize", "--pointed", "--genus", "1", "--p", "1,0,0,0,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exact_m_assembly_gives_same_discriminant() {
    let mut args = vec!["minimize", "--assembly", "exact-m"];
    args.extend(EXAMPLE);
    let doc = json_of(&hypermin(&args));
    assert_eq!(factors(&doc), vec![(2, 12), (5, 11), (11, 8), (13, 8), (17, 8)]);
}

#[test]
fn normalize_at_two() {
    let doc = json_of(&hypermin(&["normalize", "--prime", "2", "--genus", "2", "--p", "4,0,0,0,0,0,4"]));
    assert_eq!(coeff_arg(&doc, "q"), "-2,0,0,-2");
    assert_eq!(coeff_arg(&doc, "p"), "0,0,0,-2");
    assert_eq!(doc["v_drop"], 20);
}

#[test]
fn verify_agrees_with_oracle() {
    let mut args = vec!["verify", "--prime", "17", "--depth", "2"];
    args.extend(EXAMPLE);
    let doc = json_of(&hypermin(&args));
    assert_eq!(doc["agree"], true);
    assert_eq!(doc["oracle_v"], 8);
}

#[test]
fn oracle_timeout_exit_code() {
    let out = hypermin(&["verify", "--prime", "97", "--depth", "4", "--genus", "1", "--p", "1,0,0,1"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[oracle-timeout]"));
}

#[test]
fn invalid_and_singular_exit_codes() {
    let out = hypermin(&["disc", "--genus", "1", "--p", "0,0,0,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[singular]"));
    let out = hypermin(&["disc", "--genus", "1", "--p", "1,x"]);
    assert_eq!(out.status.code(), Some(2));
    let out = hypermin(&["disc", "--genus", "1", "--p", "1,0,0,0,0,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn incomplete_factorization_exit_code() {
    // The discriminant has a cofactor of about 290 digits with no small factors.
    let p = "1,0,0,1000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000001";
    let out = hypermin(&["minimize", "--genus", "1", "--p", p]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[incomplete-factorization]"));
}

#[test]
fn stdin_input() {
    let out = hypermin_stdin(&["disc", "--stdin"], r#"{"genus": 1, "q": [], "p": ["1", "0", "0", 1]}"#);
    let doc = json_of(&out);
    assert_eq!(factors(&doc), vec![(2, 4), (3, 3)]);
    let out = hypermin_stdin(&["disc", "--stdin"], "not json");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn text_and_json_agree() {
    let mut args = vec!["minimize"];
    args.extend(EXAMPLE);
    let doc = json_of(&hypermin(&args));
    args.extend(["--format", "text"]);
    let out = hypermin(&args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let line = |key: &str| text.lines().find_map(|l| l.strip_prefix(&format!("{key}: "))).unwrap().to_string();
    assert_eq!(line("change.e"), doc["change"]["e"].as_str().unwrap());
    assert_eq!(line("p"), format!("[{}]", coeff_arg(&doc, "p").replace(',', ", ")));
    assert_eq!(line("disc"), "sign=1 factors=2^12*5^11*11^8*13^8*17^8 cofactor=1");
    assert_eq!(line("reports[4].v_after"), "8");
}

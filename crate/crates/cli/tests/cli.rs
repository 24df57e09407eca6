//! The binary end to end: payloads, formats and exit codes.

use std::process::{Command, Output};

use serde_json::{json, Value};

fn cartan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cartan")).args(args).output().expect("binary runs")
}

fn json_of(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = cartan(&all);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

const KEYS: [&str; 11] = [
    "problem", "flat", "equivalent", "residuals", "invariants", "eta", "C", "f", "syzygies", "structure", "swell",
];

fn assert_schema(v: &Value) {
    let obj = v.as_object().expect("object");
    assert!(obj["problem"].is_string());
    for (k, val) in obj {
        assert!(KEYS.contains(&k.as_str()), "unexpected key {k}");
        match k.as_str() {
            "flat" | "equivalent" => assert!(val.is_boolean()),
            "residuals" | "syzygies" | "structure" => {
                assert!(val.as_array().unwrap().iter().all(Value::is_string))
            }
            "invariants" => {
                let inv = val.as_object().unwrap();
                assert_eq!(inv.len(), 3);
                assert!(["I1", "I2", "I3"].iter().all(|i| inv[*i].is_string()));
            }
            "swell" => assert!(val["monomials_rbar"].is_u64()),
            "problem" | "eta" | "C" | "f" => assert!(val.is_string()),
            _ => unreachable!(),
        }
    }
}

#[test]
fn documented_payloads() {
    let v = json_of(&["check-flat", "ode2", "--f", "0"]);
    assert_eq!(v["flat"], json!(true));
    assert_eq!(v["residuals"], json!(["0", "0"]));

    let v = json_of(&["painleve", "--f", "6*y^2 + x + 5"]);
    assert_eq!((&v["equivalent"], &v["eta"], &v["C"]), (&json!(true), &json!("y"), &json!("5")));

    let v = json_of(&["invariants", "--f", "6*y^2 + x"]);
    assert_eq!(v["invariants"], json!({"I1": "-12*y", "I2": "0", "I3": "0"}));
}

#[test]
fn every_command_emits_the_schema() {
    let runs: [&[&str]; 10] = [
        &["check-flat", "ode2", "--f", "-p^2/y"],
        &["check-flat", "odesys", "--F1", "dx1^3", "--F2", "0"],
        &["check-flat", "pdesys", "--f11", "0", "--f12", "u1*u2", "--f22", "0"],
        &["invariants"],
        &["syzygies"],
        &["structure", "--f", "0"],
        &["structure", "--contact", "1,1,2", "--max-prolong", "1"],
        &["painleve", "--f", "p^3"],
        &["pullback", "--eta", "y^2", "--C", "0", "--target", "0"],
        &["swell-demo"],
    ];
    for args in runs {
        assert_schema(&json_of(args));
    }
}

#[test]
fn verdicts_live_in_the_payload() {
    let v = json_of(&["check-flat", "odesys", "--F1", "dx1^3", "--F2", "0"]);
    assert_eq!(v["flat"], json!(false));
    // The flat equation misses Painlevé I on the X3(C) condition with residual 12.
    let v = json_of(&["painleve", "--f", "0"]);
    assert_eq!((&v["equivalent"], &v["residuals"]), (&json!(false), &json!(["12"])));
    let v = json_of(&["pullback", "--eta", "y^2", "--C", "0", "--target", "0"]);
    assert_eq!(v["f"], json!("-p^2/y"));
    let v = json_of(&["check-flat", "ode2", "--f", "-p^2/y"]);
    assert_eq!(v["flat"], json!(true));
}

#[test]
fn swell_count_is_reported() {
    let v = json_of(&["swell-demo"]);
    assert_eq!(v["swell"]["monomials_rbar"], json!(466));
}

#[test]
fn output_is_deterministic() {
    for format in ["text", "json", "latex"] {
        let args = ["structure", "--f", "6*y^2 + x", "--format", format];
        let a = cartan(&args);
        let b = cartan(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn text_and_latex_formats() {
    let out = cartan(&["invariants", "--f", "6*y^2 + x"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("I1 = -12*y"), "{text}");
    let out = cartan(&["invariants", "--format", "latex"]);
    let tex = String::from_utf8(out.stdout).unwrap();
    assert!(tex.starts_with("\\begin{align*}"));
    assert!(tex.contains("I_{2} &= \\frac{\\frac{1}{2} f_{ppp}}{{a_{3}}^{2}}"), "{tex}");
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| cartan(args).status.code();
    // Parse errors.
    assert_eq!(code(&["invariants", "--f", "2x"]), Some(2));
    assert_eq!(code(&["invariants", "--f", "6*y^2 +"]), Some(2));
    assert_eq!(code(&["invariants", "--f", "q"]), Some(2));
    assert_eq!(code(&["check-flat", "odesys", "--F1", "x", "--F2", "0"]), Some(2));
    assert_eq!(code(&["check-flat", "ode2"]), Some(2));
    // Domain errors.
    assert_eq!(code(&["painleve", "--f", "a3"]), Some(3));
    assert_eq!(code(&["check-flat", "ode2", "--f", "a3*y"]), Some(3));
    assert_eq!(code(&["invariants", "--f", "1/(y-y)"]), Some(3));
    assert_eq!(code(&["pullback", "--eta", "x", "--C", "0", "--target", "0"]), Some(3));
    assert_eq!(code(&["structure", "--contact", "0,1,1"]), Some(3));
    assert_eq!(code(&["swell-demo", "--xi", "y", "--eta", "r"]), Some(3));
}

#[test]
fn parse_errors_report_the_column() {
    let out = cartan(&["invariants", "--f", "x + 2y"]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("column 6"), "{err}");
}

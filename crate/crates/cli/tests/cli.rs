use std::process::{Command, Output};

use serde_json::Value;

fn hecke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecke"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn coeffs(series: &Value) -> Vec<String> {
    series["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|pair| {
            assert_eq!(pair[1], "0");
            pair[0].as_str().unwrap().to_string()
        })
        .collect()
}

#[test]
fn expand_lists_coefficients() {
    let out = hecke(&["expand", "--expr", "polylog(-2)", "--order", "4"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(
        (v["shift"].as_u64(), v["known_to"].as_u64()),
        (Some(1), Some(4))
    );
    assert_eq!(coeffs(&v), ["1", "1/4", "1/9"]);

    let out = hecke(&[
        "expand", "--expr", "geom", "--order", "3", "--format", "table",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "exponent\tcoefficient\n0\t1\n1\t1\n2\t1\n");
}

#[test]
fn parse_errors_exit_2_with_offset() {
    let out = hecke(&["expand", "--expr", "U(2"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("byte 3") && err.contains("')'"), "{err}");
}

#[test]
fn transform_both_agrees_on_dilogarithm() {
    let out = hecke(&[
        "transform",
        "--n",
        "2",
        "--expr",
        "x^1*pFq([1,1,1],[2,2])",
        "--mode",
        "both",
        "--order",
        "40",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["agree"], true);
    let norm = &v["closed"]["normalized"];
    assert_eq!(norm["c0"], "1/4");
    assert_eq!(norm["upper"], serde_json::json!(["1", "1", "1"]));
    // the term encoding carries the k! slot
    assert_eq!(norm["lower"], serde_json::json!(["1", "2", "2"]));
}

#[test]
fn transform_divisible_shift() {
    let out = hecke(&[
        "transform",
        "--n",
        "3",
        "--expr",
        "x^6*pFq([1],[ ])",
        "--order",
        "30",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["agree"], true);
    assert_eq!(v["closed"]["case_divides"], true);
    assert_eq!(v["closed"]["output"]["shift"], 2);
}

#[test]
fn transform_closed_on_sum_exits_3() {
    let out = hecke(&[
        "transform",
        "--n",
        "2",
        "--expr",
        "geom + geom",
        "--mode",
        "closed",
    ]);
    assert_eq!(out.status.code(), Some(3));
    // termwise works on anything
    let out = hecke(&[
        "transform",
        "--n",
        "2",
        "--expr",
        "geom + geom",
        "--mode",
        "termwise",
        "--order",
        "3",
    ]);
    assert!(out.status.success());
    assert_eq!(coeffs(&json(&out)["termwise"]), ["2", "2", "2"]);
}

#[test]
fn eigen_reports() {
    let v = json(&hecke(&["eigen", "--n", "5", "--expr", "polylog(-2)"]));
    assert_eq!(v["eigenvalue"], "1/25");
    assert_eq!(v["class"]["kind"], "Polylog");
    assert_eq!(v["class"]["a"], 2);

    let v = json(&hecke(&["eigen", "--n", "2", "--expr", "pFq([1],[])"]));
    assert_eq!(
        (v["eigenvalue"].as_str(), v["class"]["kind"].as_str()),
        (Some("1"), Some("Geometric"))
    );

    // textbook lower list: pFq([1],[1]) is the exponential series
    let v = json(&hecke(&["eigen", "--n", "2", "--expr", "pFq([1],[1])"]));
    assert_eq!(v["is_eigen"], false);

    let out = hecke(&["eigen", "--n", "2", "--expr", "pFq([1/2],[ ])"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(
        (v["is_eigen"].as_bool(), v["witness"].as_u64()),
        (Some(false), Some(1))
    );

    // series-only expressions get a numeric report without a class
    let v = json(&hecke(&["eigen", "--n", "3", "--expr", "euler^2 geom"]));
    assert_eq!(v["eigenvalue"], "9");
    assert!(v.get("class").is_none());
}

#[test]
fn eigen_rejects_index_one() {
    assert_eq!(
        hecke(&["eigen", "--n", "1", "--expr", "geom"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn classify_cm_examples() {
    let v = json(&hecke(&[
        "classify-cm",
        "--a",
        "2,2",
        "--b",
        "1",
        "--bound",
        "30",
    ]));
    assert_eq!(
        (v["is_cm"].as_bool(), v["exponent"].as_i64()),
        (Some(true), Some(2))
    );
    let v = json(&hecke(&[
        "classify-cm",
        "--a",
        "1,1,1",
        "--b",
        "2,2",
        "--bound",
        "30",
    ]));
    assert_eq!(v["exponent"], -2);
    let v = json(&hecke(&[
        "classify-cm",
        "--a",
        "1/2",
        "--b",
        "",
        "--bound",
        "8",
    ]));
    assert_eq!(v["is_cm"], false);
    assert_eq!(v["witness"], serde_json::json!([2, 2]));
    assert_eq!(
        (v["c_mk"].as_str(), v["c_m_times_c_k"].as_str()),
        (Some("5/16"), Some("1/4"))
    );

    assert_eq!(
        hecke(&["classify-cm", "--a", "1", "--b", "-2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        hecke(&["classify-cm", "--a", "one", "--b", ""])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn inner_product_sequence() {
    let v = json(&hecke(&[
        "inner",
        "--left",
        "1*i*geom",
        "--right",
        "1*i*geom",
        "--order",
        "3",
        "--r-squared",
        "2",
    ]));
    assert_eq!(coeffs(&v), ["1", "1", "1"]);
    assert_eq!(v["value"], "7");
}

#[test]
fn verify_exit_codes_and_shape() {
    let out = hecke(&[
        "verify", "--suite", "spectrum", "--trials", "1", "--seed", "7",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["suite"], "spectrum");
    assert_eq!(v["failures"], serde_json::json!([]));

    assert_eq!(hecke(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(
        hecke(&["verify", "--suite", "algebra", "--trials", "0"])
            .status
            .code(),
        Some(2)
    );
}

use std::collections::BTreeMap;
use std::fs;

use mlechar::cli::run;

fn invoke(args: &[&str]) -> (i32, BTreeMap<String, String>) {
    let mut buf = Vec::new();
    let argv = std::iter::once("mlechar").chain(args.iter().copied());
    let code = run(argv, &mut buf);
    let text = String::from_utf8(buf).unwrap();
    let kv = text
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    (code, kv)
}

#[test]
fn analyze_reports_catalog_mnss() {
    let (code, kv) = invoke(&["analyze", "--family", "gaussian", "--kind", "loc"]);
    assert_eq!(code, 0);
    assert_eq!(kv["mnss"], "3");
    assert_eq!(kv["expected_mnss"], "3");
    assert_eq!(kv["characterizable"], "true");

    let (code, kv) = invoke(&["analyze", "--family", "student", "--params", "nu=5", "--kind", "scale"]);
    assert_eq!(code, 0);
    assert_eq!(kv["mnss"], "6");
}

#[test]
fn mcss_and_projectability() {
    let (code, kv) = invoke(&["mcss", "--p-minus", "1", "--p-plus", "3", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(kv["mcss"], "4");
    assert_eq!(kv["projectable"], "false");

    let (_, kv) = invoke(&["mcss", "--p-minus", "1", "--p-plus", "inf"]);
    assert_eq!(kv["mcss"], "inf");
}

#[test]
fn invalid_input_exits_two() {
    assert_eq!(invoke(&["mcss", "--p-minus", "-1", "--p-plus", "3"]).0, 2);
    assert_eq!(invoke(&["analyze", "--family", "nope", "--kind", "loc"]).0, 2);
    assert_eq!(invoke(&["frobnicate"]).0, 2);
    assert_eq!(invoke(&["mle", "--family", "gaussian", "--kind", "loc", "--data", "/no/such/file"]).0, 2);
}

#[test]
fn mle_numeric_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("x.txt");
    fs::write(&data, "1\n2\n4\n").unwrap();
    let path = data.to_str().unwrap();
    let (code, numeric) = invoke(&["mle", "--family", "gaussian", "--kind", "loc", "--data", path]);
    assert_eq!(code, 0);
    let (code, closed) = invoke(&["mle", "--family", "gaussian", "--kind", "loc", "--data", path, "--closed-form"]);
    assert_eq!(code, 0);
    let a: f64 = numeric["theta_hat"].parse().unwrap();
    let b: f64 = closed["theta_hat"].parse().unwrap();
    assert!((a - 7.0 / 3.0).abs() < 1e-10);
    assert!((a - b).abs() < 1e-10);
}

#[test]
fn forged_file_round_trips_through_same_class() {
    let dir = tempfile::tempdir().unwrap();
    let forged = dir.path().join("quartic.json");
    let forged = forged.to_str().unwrap();
    let (code, _) = invoke(&["forge", "--target", "gaussian", "--h", "odd-power:d=1,p=3", "--emit", forged]);
    assert_eq!(code, 0);

    let (code, kv) = invoke(&["same-class", "--f", "gaussian", "--g", forged, "--kind", "loc", "--tol", "1e-2"]);
    assert_eq!(code, 0);
    assert_eq!(kv["same_class"], "false");
}

#[test]
fn tilt_emits_a_class_member() {
    let dir = tempfile::tempdir().unwrap();
    let tilted = dir.path().join("tilt.json");
    let tilted = tilted.to_str().unwrap();
    let (code, _) = invoke(&["tilt", "--family", "gaussian", "--kind", "loc", "--d", "2", "--emit", tilted]);
    assert_eq!(code, 0);
    let (_, kv) = invoke(&["same-class", "--f", "gaussian", "--g", tilted, "--kind", "loc", "--tol", "1e-2"]);
    assert_eq!(kv["same_class"], "true");
    let d: f64 = kv["d"].parse().unwrap();
    assert!((d - 2.0).abs() < 1e-2, "d = {d}");
}

#[test]
fn counterexample_agrees_at_two_and_not_three() {
    let common = ["verify-counterexample", "--f", "gaussian", "--h", "odd-power:d=1,p=3", "--trials", "50"];
    let (code, kv) = invoke(&[&common[..], &["--n", "2"]].concat());
    assert_eq!(code, 0);
    assert_eq!(kv["fraction"], "1");
    let (_, kv) = invoke(&[&common[..], &["--n", "3"]].concat());
    let frac: f64 = kv["fraction"].parse().unwrap();
    assert!(frac < 0.05);
}

#[test]
fn suite_with_small_config_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.json");
    let report = dir.path().join("report.json");
    fs::write(
        &cfg,
        r#"{"families":[{"name":"gaussian","kinds":["location"]}],"classes":[],"counterexamples":[],"distinct_pairs":[],"trials":20}"#,
    )
    .unwrap();
    let (code, _) = invoke(&[
        "suite",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "machine",
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let bytes = fs::read(&report).unwrap();
    let parsed = mlechar::suite::parse_report(&bytes).unwrap();
    assert!(parsed.families.iter().any(|r| r.key.starts_with("gaussian") && r.mnss.to_string() == "3" && r.matches));
}

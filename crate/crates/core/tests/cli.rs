mod common;

use std::process::{Command, Output};

use common::data_path;

fn essrange(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_essrange")).args(args).output().unwrap()
}

fn spec(name: &str) -> String {
    data_path(name).to_string_lossy().into_owned()
}

#[test]
fn ragged_spec_exits_with_validation_code() {
    let out = essrange(&["essential", &spec("ragged.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cycle[0]"), "{err}");
}

#[test]
fn malformed_json_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"prefix\": [], \"tail\": {\"kind\": \"periodic\", \"cycle\": [[[[1, 0]]], ]}}").unwrap();
    let out = essrange(&["range", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_flags_are_rejected() {
    let out = essrange(&["range", &spec("constant.json"), "--angles", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let out = essrange(&["essential", &spec("constant.json"), "--eps", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tight_k_cap_reports_non_convergence() {
    let out = essrange(&["essential", &spec("dense.json"), "--eps", "0.001", "--k-cap", "64"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn range_prints_support_table() {
    let out = essrange(&["range", &spec("constant.json"), "--angles", "16"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,support,boundary_re,boundary_im"));
    assert_eq!(lines.count(), 16);
}

#[test]
fn essential_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("we.csv");
    let svg = dir.path().join("we.svg");
    let cert = dir.path().join("we.json");
    let out = essrange(&[
        "essential",
        &spec("two_matrix.json"),
        "--csv",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
        "--cert",
        cert.to_str().unwrap(),
        "--samples",
        "200",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("re,im\n"));
    assert!(dir.path().join("we.limsup.csv").exists());
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert!(doc["crosscheck_gap"].as_f64().unwrap() <= 10.0 * doc["tolerance"].as_f64().unwrap());
}

#[test]
fn fixed_seed_output_is_byte_identical() {
    let args = ["oracle", &spec("vanishing.json"), "--samples", "500", "--seed", "11", "--k", "8"];
    let a = essrange(&args);
    let b = essrange(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = essrange(&["oracle", &spec("vanishing.json"), "--samples", "500", "--seed", "12", "--k", "8"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn verify_separates_grouped_and_ungrouped() {
    let gap = |extra: &[&str]| {
        let path = spec("two_matrix.json");
        let mut args = vec!["verify", path.as_str()];
        args.extend_from_slice(extra);
        let out = essrange(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let text = String::from_utf8(out.stdout).unwrap();
        let line = text.lines().find(|l| l.starts_with("conv_free_gap,")).unwrap();
        line["conv_free_gap,".len()..].parse::<f64>().unwrap()
    };
    assert!(gap(&[]) <= 0.02);
    assert!(gap(&["--ungrouped"]) > 0.1);
}

#[test]
fn decompose_lists_groups() {
    let out = essrange(&["decompose", &spec("two_matrix.json"), "--groups", "8"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("m,boundary,distance"));
    assert_eq!(text.lines().count(), 9);
}

use std::process::{Command, Output};

use serde_json::Value;

fn xxchain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xxchain"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = xxchain(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn invalid_chains_exit_with_two() {
    assert_eq!(xxchain(&["correlator", "--L", "7"]).status.code(), Some(2));
    assert_eq!(xxchain(&["correlator", "--L", "8"]).status.code(), Some(2));
    assert_eq!(xxchain(&["formfactor", "--L", "16", "--M", "7", "--method", "brute"]).status.code(), Some(2));
    assert_eq!(xxchain(&["nq", "--L", "10", "--method", "asymptotic", "--alpha", "1"]).status.code(), Some(2));
    assert_eq!(xxchain(&["correlator", "--L", "6", "--x-max", "9"]).status.code(), Some(2));
}

#[test]
fn six_site_correlator_in_json() {
    let v = json(&["correlator", "--L", "6", "--method", "rn"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert!((rows[1]["rn"].as_f64().unwrap() - 2.0 / 9.0).abs() < 1e-14);
    assert!((rows[0]["rn"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-14);
    assert_eq!(v["metadata"]["config"]["L"], 6);
    assert_eq!(v["metadata"]["provenance"]["rn"], "exact");
}

#[test]
fn alternating_convention_flips_odd_distances() {
    let v = json(&["correlator", "--L", "6", "--convention", "alternating"]);
    let g1 = v["rows"][0]["rn"].as_f64().unwrap();
    let g2 = v["rows"][1]["rn"].as_f64().unwrap();
    assert!(g1 < 0.0 && g2 > 0.0);
}

#[test]
fn exact_routes_agree_at_102_sites() {
    let v = json(&["correlator", "--L", "102", "--method", "all"]);
    let worst = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["max_exact_deviation"].as_f64().unwrap())
        .fold(0.0, f64::max);
    assert!(worst < 1e-10, "{worst}");
    assert_eq!(v["metadata"]["provenance"]["asymptotic"], "asymptotic");
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_xxchain"))
            .args(["nq", "--L", "14", "--method", "ffsum", "--exhaustive"])
            .env("XXCHAIN_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    let one = run("1");
    assert!(!one.is_empty());
    assert_eq!(one, run("4"));
}

#[test]
fn formfactor_methods_agree_on_small_chain() {
    let v = json(&["formfactor", "--L", "10", "--method", "all"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let first = rows[0]["log_magnitude"].as_f64().unwrap();
    for r in rows {
        assert!((r["log_magnitude"].as_f64().unwrap() - first).abs() < 1e-12);
    }
}

#[test]
fn zone_sum_is_the_density() {
    let v = json(&["nq", "--L", "10", "--sum"]);
    assert!((v["rows"][0]["sum"].as_f64().unwrap() - 0.5).abs() < 1e-13);
}

#[test]
fn quoted_constant_is_tagged() {
    let v = json(&["nq", "--L", "10", "--method", "asymptotic", "--c0", "value"]);
    assert_eq!(v["metadata"]["provenance"]["nq_sqrt_l_over_c0"], "paper-constant");
    assert_eq!(v["metadata"]["provenance"]["nq"], "asymptotic");
}

#[test]
fn csv_carries_metadata_comments() {
    let out = xxchain(&["constants"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# xxchain"));
    assert!(lines.next().unwrap().starts_with("# config:"));
    assert!(lines.next().unwrap().starts_with("# provenance:"));
    assert_eq!(lines.next(), Some("name,value,provenance"));
    assert!(text.contains("c0_quoted,"));
}

#[test]
fn verify_constants_group_passes() {
    let out = xxchain(&["verify", "--only", "constants"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("[PASS]")).count() >= 5);
    assert_eq!(xxchain(&["verify", "--only", "nonsense"]).status.code(), Some(2));
}

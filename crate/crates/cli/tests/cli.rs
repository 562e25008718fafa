use std::process::{Command, Output};

use serde_json::Value;

fn symsq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symsq"))
        .args(args)
        .env_remove("SYMSQ_MAX_DIM")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = symsq(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn orbits_report_matches_cyclic_three() {
    let v = json(&["orbits", "--action", "cyclic", "--n", "3"]);
    let r = &v["result"];
    assert_eq!(r["orbit_sizes"], serde_json::json!([1, 3, 3, 1]));
    assert_eq!(r["p_norm_sq"], 0.3125);
    assert_eq!(r["max_orbit"], 3);
    assert_eq!(v["config"]["subcommand"], "orbits");
    assert!(v["version"].is_string());
}

#[test]
fn graph_isomorphism_two_has_ten_orbits() {
    let v = json(&["orbits", "--action", "graphiso", "--n", "2"]);
    assert_eq!(v["result"]["orbit_count"], 10);
}

#[test]
fn same_seed_gives_identical_bytes() {
    let args = ["variance", "--action", "cyclic", "--n", "3", "--mode", "montecarlo", "--trials", "2000", "--seed", "11"];
    assert_eq!(symsq(&args).stdout, symsq(&args).stdout);
    let t = ["tolerance", "--seed", "5"];
    assert_eq!(symsq(&t).stdout, symsq(&t).stdout);
}

#[test]
fn different_seeds_change_monte_carlo() {
    let a = json(&["variance", "--action", "cyclic", "--n", "3", "--mode", "montecarlo", "--trials", "2000", "--seed", "1"]);
    let b = json(&["variance", "--action", "cyclic", "--n", "3", "--mode", "montecarlo", "--trials", "2000", "--seed", "2"]);
    assert_ne!(a["result"]["variance"]["value"], b["result"]["variance"]["value"]);
    assert_eq!(a["seed"], 1);
}

#[test]
fn tolerance_example() {
    let v = json(&["tolerance", "--zeta", "0.2", "--tau", "0.5", "--m", "4", "--seed", "7"]);
    let r = &v["result"];
    assert_eq!(r["window"]["low"], 0.4);
    assert_eq!(r["window"]["high"], 0.6);
    assert_eq!(r["identified_target"], r["hidden_target"]);
    assert_eq!(r["all_identified"], true);
    assert!(r["max_queries"].as_u64().unwrap() <= 4);
    assert_eq!(r["sq_baseline_accuracy"], 0.25);
}

#[test]
fn tolerance_outside_window_exits_one() {
    let out = symsq(&["tolerance", "--zeta", "0.2", "--tau", "0.7", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn seeded_commands_require_a_seed() {
    assert_eq!(symsq(&["tolerance"]).status.code(), Some(1));
}

#[test]
fn unknown_subcommand_exits_one() {
    assert_eq!(symsq(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(symsq(&["--help"]).status.code(), Some(0));
}

#[test]
fn ideal_parity_refuses_large_tolerance() {
    let out = symsq(&["learn-parity", "--mode", "ideal", "--n", "3", "--tau", "0.3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn composed_csv_has_one_row_per_target() {
    let out = symsq(&["--format", "csv", "learn-parity", "--mode", "composed", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s_index,e0,e1,e2,guess,success"));
    assert_eq!(lines.count(), 8);
}

#[test]
fn orbits_csv() {
    let out = symsq(&["--format", "csv", "orbits", "--action", "cyclic", "--n", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "orbit,size,representative\n0,1,0\n1,3,1\n2,3,3\n3,1,7\n");
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("symsq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("orbits.json");
    let out = symsq(&["orbits", "--action", "cyclic", "--n", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["result"]["orbit_count"], 6);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn partition_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("symsq-part-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("p.txt");
    std::fs::write(&path, "0 1 2\n3\n4 5\n").unwrap();
    let v = json(&["orbits", "--action", "partition", "--partition-file", path.to_str().unwrap()]);
    assert_eq!(v["result"]["orbit_count"], 3);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn dimension_cap_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_symsq"))
        .args(["orbits", "--action", "cyclic", "--n", "3"])
        .env("SYMSQ_MAX_DIM", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_exits_two_when_a_check_fails() {
    let out = Command::new(env!("CARGO_BIN_EXE_symsq"))
        .arg("verify")
        .env("SYMSQ_MAX_DIM", "64")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}

#[test]
fn verify_passes() {
    let out = symsq(&["verify"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["seed"], 2024);
}

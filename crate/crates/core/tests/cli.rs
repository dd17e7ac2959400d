use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strongly-harmonic")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write_hexagon(dir: &Path) -> String {
    let path = dir.join("hex.json");
    let body = r#"{"n": 2, "vertices": [["2","0"],["-2","0"],["1","2"],["-1","-2"],["1","-2"],["-1","2"]]}"#;
    std::fs::write(&path, body).unwrap();
    format!("polytope:{}", path.display())
}

#[test]
fn basis_reports_eight_for_the_cube() {
    let out = run(&["basis", "--norm", "lp:inf", "--n", "2", "--degree", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["dimension"], 8);
    assert_eq!(v["exact"], true);
    assert_eq!(v["linear_isometries"], "8");
}

#[test]
fn basis_output_is_byte_identical_across_runs() {
    let args = ["basis", "--norm", "lp:3", "--n", "2", "--degree", "5"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let out = run(&["moments", "--norm", "lp:1", "--n", "2", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v.to_string().contains("1/15"), "{v}");
}

#[test]
fn verify_exit_codes() {
    let good = run(&["verify", "--norm", "lp:1", "--n", "2", "--candidate", "x^3 - 3*x*y^2", "--probe", "1,2;1/2"]);
    assert_eq!(good.status.code(), Some(0));
    assert_eq!(json(&good)["pass"], true);

    let bad = run(&["verify", "--norm", "lp:1", "--n", "2", "--candidate", "x^2", "--probe", "1,2;1/2"]);
    assert_eq!(bad.status.code(), Some(1));

    let outside = run(&["verify", "--norm", "lp:1", "--n", "2", "--candidate", "x", "--probe", "9.9,0;1"]);
    assert_eq!(outside.status.code(), Some(2));

    let untyped = run(&["verify", "--norm", "lp:3", "--n", "2", "--candidate", "x", "--probe", "0,0;1", "--oracle", "exact-pizzetti"]);
    assert_eq!(untyped.status.code(), Some(2));
}

#[test]
fn verify_echoes_seed_and_is_reproducible() {
    let args = [
        "verify", "--norm", "lp:4", "--n", "2", "--candidate", "x*y", "--random-probes", "3", "--max-radius", "1/2",
        "--oracle", "mc", "--samples", "200000", "--seed", "17",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 17);
}

#[test]
fn polytope_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let norm = write_hexagon(dir.path());
    let out = run(&["verify", "--norm", &norm, "--candidate", "1", "--weight", "3 + x", "--probe", "1/2,1/3;1/5", "--oracle", "exact"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let scan = run(&["scan", "--norm", &norm, "--degrees", "2..4"]);
    assert_eq!(scan.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&scan.stdout), "degree,dimension,exact,spectral_gap\n2,5,true,\n3,7,true,\n4,9,true,\n");
}

#[test]
fn pizzetti_mean_of_square() {
    let out = run(&["pizzetti", "--norm", "lp:2", "--n", "2", "--f", "x^2", "--at", "-1,0", "--radius", "2"]);
    assert_eq!(out.status.code(), Some(0));
    // 1 + r²·M(2,0) = 1 + 4/4
    assert_eq!(json(&out)["mean"]["exact"], "2");
}

#[test]
fn fp_table_has_header_and_rows() {
    let out = run(&["fp", "--grid", "1,2,3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "p,f,df_numeric,df_closed");
    assert_eq!(lines.len(), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("strictly increasing: true"));
}

#[test]
fn bose_coincides() {
    let out = run(&["bose", "--weight", "2 + x", "--degree", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["coincide"], true);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["basis", "--norm", "lp:0.5", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["basis", "--norm", "lp:2", "--n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

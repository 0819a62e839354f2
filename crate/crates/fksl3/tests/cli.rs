use std::process::{Command, Output};

fn fksl3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fksl3")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    fksl3(args).status.code().expect("exit code")
}

#[test]
fn trefoil_json_payload() {
    let out = fksl3(&["compute", "--braid", "1 1 1", "--strands", "2", "--dx", "3", "--dy", "3"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["offset"]["ex"], -2);
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 16);
    let c00 = &v["coefficients"][0];
    assert_eq!((c00["i"].as_u64(), c00["j"].as_u64()), (Some(0), Some(0)));
    assert_eq!(c00["poly"].as_array().unwrap().len(), 1);
    assert_eq!(c00["poly"][0]["coeff"], "1");
}

#[test]
fn documented_exit_codes() {
    assert_eq!(code(&["compute", "--braid", "1 x"]), 2);
    assert_eq!(code(&["compute", "--braid", "3", "--strands", "2"]), 2);
    assert_eq!(code(&["compute", "--braid", "1 1", "--strands", "2"]), 3);
    assert_eq!(code(&["compute", "--braid", "1 1 1", "--dx", "2", "--dy", "2", "--convention", "balanced", "--max-q", "9"]), 4);
    assert_eq!(code(&["oracle", "--check", "alexander", "--braid", "1 1"]), 3);
    assert_eq!(code(&["compute"]), 1);
}

#[test]
fn oracle_checks_pass() {
    assert_eq!(code(&["oracle", "--check", "alexander", "--braid", "1 1 1"]), 0);
    assert_eq!(code(&["oracle", "--check", "yang-baxter", "--spec", "1,1"]), 0);
    let out = fksl3(&["oracle", "--check", "rt", "--braid", "1 1 1", "--spec", "1,0", "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("rt: pass") && text.contains("unit normalization"), "{text}");
}

#[test]
fn symmetric_text_matches_printed_series() {
    let out = fksl3(&["compute", "--braid", "1 1 1", "--convention", "symmetric", "--format", "text"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim_end(),
        "1 + (1 + q)(qx) + (1 + q - q^3)(qx)^2 + (1 + q - q^3 - 2*q^4 - q^5)(qx)^3 + …"
    );
}

#[test]
fn output_is_byte_identical_across_thread_counts() {
    let args = ["compute", "--braid", "1 1 1", "--dx", "3", "--dy", "3", "--convention", "negative"];
    let one = fksl3(&[&["--threads", "1"], &args[..]].concat());
    let four = fksl3(&[&["--threads", "4"], &args[..]].concat());
    let again = fksl3(&[&["--threads", "4"], &args[..]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(four.stdout, again.stdout);
}

#[test]
fn threads_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_fksl3"))
        .env("FKSL3_THREADS", "2")
        .args(["compute", "--braid", "1 1 1", "--dx", "1", "--dy", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
}

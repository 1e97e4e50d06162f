//! Exit-code and validation behavior of the CLI.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_svol")
}

fn run(args: &[&str]) -> (Option<i32>, String, String) {
    let output = Command::new(bin()).args(args).output().expect("spawn svol");
    (
        output.status.code(),
        String::from_utf8_lossy(&output.stdout).into_owned(),
        String::from_utf8_lossy(&output.stderr).into_owned(),
    )
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("svol-behavior-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn returns_file(name: &str, body: &str) -> String {
    let path = scratch(name);
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn unknown_flag_prints_usage_and_exits_1() {
    let (code, _, stderr) = run(&["filter", "--nope", "1"]);
    assert_eq!(code, Some(1));
    assert!(stderr.to_lowercase().contains("usage"), "stderr: {stderr}");
}

#[test]
fn help_exits_0() {
    let (code, stdout, _) = run(&["--help"]);
    assert_eq!(code, Some(0));
    assert!(stdout.contains("simulate"));
    assert!(stdout.contains("hessian"));
}

#[test]
fn invalid_particle_count_fails_before_running() {
    let data = returns_file("ok.csv", "date,return\n1,0.1\n2,-0.2\n");
    let out = scratch("out-particles").display().to_string();
    let (code, _, stderr) = run(&["filter", "--data", &data, "--particles", "0", "--out", &out]);
    assert_eq!(code, Some(1), "stderr: {stderr}");
}

#[test]
fn domain_errors_exit_1() {
    let data = returns_file("ok2.csv", "date,return\n1,0.1\n2,-0.2\n");
    let out = scratch("out-domain").display().to_string();
    // phi outside (0,1)
    let (code, _, _) = run(&["filter", "--data", &data, "--phi", "1.2", "--out", &out]);
    assert_eq!(code, Some(1));
    // rho flag on the random-walk model
    let (code, _, _) = run(&[
        "filter", "--model", "rw", "--data", &data, "--rho", "-0.5", "--out", &out,
    ]);
    assert_eq!(code, Some(1));
    // missing data file
    let (code, _, _) = run(&["filter", "--data", "/no/such/file.csv", "--out", &out]);
    assert_eq!(code, Some(1));
    // malformed row
    let bad = returns_file("bad.csv", "date,return\n1,0.1\n2,NaN\n");
    let (code, _, stderr) = run(&["filter", "--data", &bad, "--out", &out]);
    assert_eq!(code, Some(1));
    assert!(stderr.contains("line 3"), "stderr: {stderr}");
    // expected length mismatch
    let (code, _, _) = run(&[
        "eval",
        "--data",
        &data,
        "--expect-n",
        "6302",
        "--particles",
        "50",
        "--out",
        &out,
    ]);
    assert_eq!(code, Some(1));
}

#[test]
fn filter_failure_exits_2() {
    // an absurd return forces every particle weight to zero at t = 2
    let data = returns_file("boom.csv", "date,return\n1,0.1\n2,1e200\n");
    let out = scratch("out-boom").display().to_string();
    let (code, _, stderr) = run(&[
        "filter",
        "--data",
        &data,
        "--sigma-eta",
        "1e-9",
        "--particles",
        "50",
        "--out",
        &out,
    ]);
    assert_eq!(code, Some(2), "stderr: {stderr}");
    assert!(stderr.contains("t=2"), "stderr: {stderr}");
}

#[test]
fn price_input_and_demeaning_work() {
    let prices = returns_file(
        "prices.csv",
        "date,price\n1,100\n2,101\n3,99.5\n4,100.2\n5,100.9\n",
    );
    let out = scratch("out-prices").display().to_string();
    let (code, stdout, stderr) = run(&[
        "filter",
        "--data",
        &prices,
        "--value-col",
        "price",
        "--prices",
        "--demean",
        "--particles",
        "100",
        "--out",
        &out,
    ]);
    assert_eq!(code, Some(0), "stderr: {stderr}");
    assert!(stdout.contains("over 4 observations"), "stdout: {stdout}");
}

use std::path::PathBuf;
use std::process::Command;

use shg::cli;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("shg").chain(args.iter().copied()), &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).to_string_lossy().into_owned()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn amen_on_right_zero() {
    let r = run(&["amen", &data("right_zero_3.shg")]);
    assert_eq!(r.code, 0);
    assert!(r.out.starts_with("TLIM: yes\n"), "{}", r.out);
}

#[test]
fn mean_on_left_zero() {
    let r = run(&["mean", &data("left_zero_2.shg")]);
    assert_eq!(r.code, 1);
    assert!(r.out.starts_with("TLIM: no, δ* = 1\n"), "{}", r.out);
}

#[test]
fn thm2_on_left_zero() {
    let r = run(&["thm2", &data("left_zero_2.shg"), "--sub", "0"]);
    assert_eq!(r.code, 0);
    assert!(r.out.starts_with("(a)=(b)=(c)=yes, Type L: yes\n"), "{}", r.out);
}

#[test]
fn mean_with_sub_and_names() {
    let r = run(&["mean", &data("two_point_half.shg"), "--sub", "e", "--mode", "max"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("m = (1, 0)"), "{}", r.out);
    let r = run(&["mean", &data("s3_classes.shg")]);
    assert!(r.out.contains("m = (1/6, 1/2, 1/3)"), "{}", r.out);
}

#[test]
fn verify_reports_axioms() {
    let r = run(&["verify", &data("s3_classes.shg")]);
    assert_eq!(r.code, 0);
    assert!(r.out.contains("hypergroup: yes"));
    let dir = tempfile::tempdir().unwrap();
    let bad = write_temp(&dir, "bad.shg", "shg 1\npoints 2\nconv 0 0 : 1=1\nconv 0 1 : 0=1\nconv 1 0 : 0=1\nconv 1 1 : 0=1\n");
    let r = run(&["verify", &bad]);
    assert_eq!(r.code, 2);
    assert!(r.out.contains("valid: no"));
    assert!(r.out.contains("associativity"), "{}", r.out);
    assert_eq!(run(&["amen", &bad]).code, 2);
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_temp(&dir, "sum.shg", "shg 1\npoints 1\nconv 0 0 : 0=5/6\n");
    let r = run(&["verify", &bad]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("row sum 5/6 ≠ 1 at line 3"), "{}", r.err);
}

#[test]
fn gap_is_deterministic() {
    let args = ["gap", &data("d4_classes.shg"), "--sub", "0,2,3", "--samples", "20", "--seed", "4", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.code, 0, "{}", a.err);
    assert_eq!(a.out, b.out);
    let json: serde_json::Value = serde_json::from_str(&a.out).unwrap();
    assert_eq!(json["result"]["reports"].as_array().unwrap().len(), 20);
    assert_eq!(json["result"]["all_hold"], true);
    assert_eq!(json["structure_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn usage_and_file_errors() {
    assert_eq!(run(&["amen"]).code, 64);
    assert_eq!(run(&["verify", "x", "--bogus"]).code, 64);
    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["verify", "/nonexistent/file.shg"]).code, 66);
    assert_eq!(run(&["thm2", &data("s3_classes.shg"), "--sub", "1"]).code, 64);
    assert_eq!(run(&["thm2", &data("s3_classes.shg"), "--sub", "7"]).code, 64);
    assert_eq!(run(&["gen", "two-point", "3/2"]).code, 64);
}

#[test]
fn gen_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tp.shg");
    let p = path.to_str().unwrap();
    assert_eq!(run(&["gen", "two-point", "2/5", "-o", p]).code, 0);
    let r = run(&["mean", p]);
    assert!(r.out.contains("m = (2/7, 5/7)"), "{}", r.out);
    let printed = run(&["gen", "random", "17"]);
    assert_eq!(printed.code, 0);
    assert_eq!(printed.out, run(&["gen", "random", "17"]).out);
    assert!(shg::format::parse_structure(&printed.out).is_ok());
}

#[test]
fn binary_exit_codes() {
    let status = Command::new(env!("CARGO_BIN_EXE_shg")).args(["mean", &data("left_zero_2.shg")]).output().unwrap();
    assert_eq!(status.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&status.stdout).contains("δ* = 1"));
}

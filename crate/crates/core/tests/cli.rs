mod common;

use common::*;
use varchenko::cli::{self, Outcome};
use varchenko::cov;

fn run(args: &[&str]) -> Outcome {
    cli::run(std::iter::once("varchenko").chain(args.iter().copied()))
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn check_one_line() {
    let out = run(&["check", &path("one_line.cov")]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.lines().any(|l| l == "axioms: PASS"), "{}", out.stdout);
}

#[test]
fn three_lines_round_trip_and_determinant() {
    let dir = tempfile::tempdir().unwrap();
    let cov_path = dir.path().join("out.cov").to_string_lossy().into_owned();
    let out = run(&["from-arrangement", &path("three_lines.json"), "-o", &cov_path]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.is_empty());

    let text = std::fs::read_to_string(&cov_path).unwrap();
    let parsed = cov::parse(&text).unwrap();
    assert_eq!(cov::write(&parsed.set, parsed.fiber.as_ref()), text);
    assert_eq!(parsed.set.len(), 13);

    let check = run(&["check", &cov_path]);
    assert_eq!(check.code, 0, "{}", check.stdout);

    let det = run(&["det", &cov_path]);
    assert_eq!(det.code, 0, "{}", det.stderr);
    let want = product(
        3,
        &[
            (one_minus_b(3, &[1]), 2),
            (one_minus_b(3, &[2]), 2),
            (one_minus_b(3, &[3]), 2),
            (one_minus_b(3, &[1, 2, 3]), 1),
        ],
    );
    assert_eq!(poly(3, det.stdout.trim()), want);
}

#[test]
fn wiring_output_matches_fixture() {
    let out = run(&["from-wiring", &path("nonpappus.json")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout, read_data("nonpappus.cov"));
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(&dir, "np.cov", &out.stdout);
    let check = run(&["check", &p]);
    assert_eq!(check.code, 0, "{}", check.stdout);
}

#[test]
fn nonpappus_verify_specialized() {
    let out = run(&["verify", &path("nonpappus.cov"), "--specialize", "all=a", "--mode", "symbolic"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("topes: 33"));
    assert!(out.stdout.contains("formula: (1 - a^2)^47 * (1 - a^6)^8"));
    assert!(out.stdout.contains("agreement: true"));
}

#[test]
fn verify_json_report() {
    let out = run(&["verify", &path("three_lines.json"), "--format", "json", "--mode", "randomized", "--seed", "7"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["mode"], "randomized");
    assert_eq!(v["topes"], 6);
    assert_eq!(v["agreement"], true);
    assert_eq!(v["evals"].as_array().unwrap().len(), 5);
    let again = run(&["verify", &path("three_lines.json"), "--format", "json", "--mode", "randomized", "--seed", "7"]);
    assert_eq!(again.stdout, out.stdout);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.cov").to_string_lossy().into_owned();
    assert_eq!(run(&["check", &missing]).code, 2);

    let garbage = write_temp(&dir, "g.cov", "n=2\n+x\n");
    let out = run(&["check", &garbage]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("line 2"), "{}", out.stderr);

    let big = write_temp(&dir, "big.cov", "n=65\n");
    assert_eq!(run(&["check", &big]).code, 2);

    // second coordinate is a loop
    let looped = write_temp(&dir, "loop.cov", "n=2\n00\n+0\n-0\n");
    assert_eq!(run(&["check", &looped]).code, 0);
    for cmd in ["det", "formula", "verify"] {
        assert_eq!(run(&[cmd, &looped]).code, 2, "{cmd}");
    }

    assert_eq!(run(&["bogus"]).code, 2);
}

#[test]
fn conflicting_fiber_flags_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = "n=2\nI=1\nu=0+\n00\n0+\n0-\n++\n+0\n+-\n-+\n-0\n--\n";
    let p = write_temp(&dir, "f.cov", text);
    assert_eq!(run(&["topes", &p]).code, 0);
    assert_eq!(run(&["topes", &p, "--fiber", "1", "--anchor", "0+"]).code, 0);
    assert_eq!(run(&["topes", &p, "--fiber", "2"]).code, 2);
    assert_eq!(run(&["topes", &p, "--anchor", "0-"]).code, 2);
}

#[test]
fn fiber_flags_select_topes() {
    let out = run(&["topes", &path("three_lines.json"), "--fiber", "1,2", "--anchor", "+-+"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout.lines().count(), 3);
    assert!(out.stdout.lines().all(|l| l.ends_with('+')));
}

#[test]
fn axiom_failure_exit_1_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_temp(&dir, "bad.cov", "n=2\n00\n++\n--\n+-\n");
    let out = run(&["check", &p]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("negation: FAIL"), "{}", out.stdout);
    assert!(out.stdout.contains("axioms: FAIL"));
    assert_eq!(run(&["det", &p]).code, 1);
}

#[test]
fn size_guard_and_force() {
    let out = run(&["det", &path("nonpappus.cov")]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("33"), "{}", out.stderr);
    let out = run(&["det", &path("nonpappus.cov"), "--specialize", "all=a"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("1 - 47*a^2"));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["--version"]).code, 0);
}

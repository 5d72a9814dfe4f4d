use std::process::{Command, Output};

use qshelf_verify::{Status, VerificationReport};

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify")).args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("qshelf-{}-{name}", std::process::id()))
}

#[test]
fn passing_run_exits_zero() {
    let out = verify(&["identities", "--k", "2..3", "--degree", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("PASS")));
    assert!(text.trim_end().ends_with("0 failed, 0 skipped"));
}

#[test]
fn json_is_byte_identical_across_runs_and_thread_counts() {
    let args = ["all", "--k", "2..3", "--degree", "24", "--shelves", "2", "--nmax", "10", "--nmax-over", "6", "--format", "json"];
    let a = verify(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_verify")).args(args).env("QSHELF_THREADS", "1").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let report: VerificationReport = serde_json::from_slice(&a.stdout).unwrap();
    assert!(report.passed());
    assert_eq!(report.to_json().as_bytes(), &a.stdout[..]);
}

#[test]
fn injected_fault_exits_one_with_mismatch() {
    let out = verify(&[
        "identities", "--k", "3", "--degree", "20", "--format", "json", "--inject-fault", "identities.bgg.k3.i2@7",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: VerificationReport = serde_json::from_slice(&out.stdout).unwrap();
    let c = report.find("identities.bgg.k3.i2").unwrap();
    assert_eq!(c.status, Status::Fail);
    let m = c.mismatch.as_ref().unwrap();
    assert_eq!(m.exponent, 7);
    assert_eq!(report.summary.fail, 1);
}

#[test]
fn recursion_input_fault_is_caught() {
    let out = verify(&["shelves", "--k", "3", "--degree", "40", "--inject-fault", "shelves.recursion.k3.j2"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("FAIL") && l.contains("shelves.recursion.k3.j2")));
    assert!(text.contains("first mismatch"));
}

#[test]
fn unknown_fault_target_exits_two() {
    let out = verify(&["identities", "--k", "3", "--degree", "20", "--inject-fault", "identities.nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("identities.nope"));
}

#[test]
fn small_degree_is_a_config_error_naming_the_minimum() {
    let out = verify(&["shelves", "--k", "4", "--shelves", "3", "--degree", "12"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("config error"), "{err}");
    assert!(err.contains("46"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let path = tmp("conf.toml");
    std::fs::write(&path, "# small run\nk = 2..4\ndegree = 18\nformat = json\n").unwrap();
    let out = verify(&["identities", "--config", path.to_str().unwrap(), "--k", "3"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(0));
    let report: VerificationReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.parameters.k, [3, 3]);
    assert_eq!(report.parameters.degree, 18);
    assert_eq!(report.parameters.q_prec, 37);
}

#[test]
fn unknown_config_key_exits_two() {
    let path = tmp("bad.conf");
    std::fs::write(&path, "precision = 4\n").unwrap();
    let out = verify(&["identities", "--config", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_file_and_timings() {
    let path = tmp("report.json");
    let out = verify(&[
        "matrices", "--k", "2", "--degree", "20", "--format", "json", "--timings", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: VerificationReport = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(report.checks.iter().all(|c| c.wall_ms.is_some()));
}

#[test]
fn witness_count_matches_generating_function() {
    use qshelf::partitions::{gen_fn, ConditionSet};
    let out = verify(&["witness", "--k", "3", "--i", "2", "--n", "9", "--ghost"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().last().unwrap();
    assert!(last.ends_with("partitions of 9"));
    let count: i64 = last.split_whitespace().next().unwrap().parse().unwrap();
    assert_eq!(text.lines().count() as i64, count + 1);
    let g = gen_fn(ConditionSet::Ghost { k: 3, i: 2, start: 0 }, 9);
    assert_eq!(g.coeff(9), Some(count.into()));
    assert!(count > 0);
}

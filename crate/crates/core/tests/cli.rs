use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn models() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn qpcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpcalc")).args(args).output().unwrap()
}

fn model(name: &str) -> String {
    models().join(name).to_string_lossy().into_owned()
}

#[test]
fn json_to_stdout_matches_golden() {
    let o = qpcalc(&["check", &model("su2_broken.qp"), "--json", "-"]);
    assert_eq!(o.status.code(), Some(1));
    let golden = std::fs::read_to_string(models().join("golden/su2_broken.json")).unwrap();
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout, golden);
}

#[test]
fn parallel_run_gives_the_same_report() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let m = model("so3_action.qp");
    assert_eq!(qpcalc(&["check", &m, "--json", a.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(qpcalc(&["check", &m, "--parallel", "--json", b.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn seed_override_is_reported() {
    let o = qpcalc(&["check", &model("courant_standard.qp"), "--seed", "5", "--trials", "2", "--json", "-"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["seed"], 5);
}

#[test]
fn text_report_lists_failing_part() {
    let o = qpcalc(&["check", &model("poisson_formal.qp")]);
    assert_eq!(o.status.code(), Some(1));
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("master: fail"), "{out}");
    assert!(out.contains("0/1 checks passed"), "{out}");
}

#[test]
fn errors_carry_positions_and_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.qp");
    std::fs::write(&bad, "chart degree 1\ncoords x[1..2]:0 xi[1..2]:1\npair x[i] <-> xi[i]\ntheta = rho[1,1]*xi[1]\n").unwrap();
    let o = qpcalc(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("bad.qp:4:9"), "{err}");
    assert!(err.contains("rho"), "{err}");
}

#[test]
fn missing_file_and_usage_exit_2() {
    assert_eq!(qpcalc(&["check", "/nonexistent/model.qp"]).status.code(), Some(2));
    assert_eq!(qpcalc(&["check"]).status.code(), Some(2));
    assert_eq!(qpcalc(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn list_checks() {
    let o = qpcalc(&["check", "--list-checks"]);
    assert_eq!(o.status.code(), Some(0));
    let out = String::from_utf8(o.stdout).unwrap();
    for name in qpcalc::model::check_names() {
        assert!(out.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

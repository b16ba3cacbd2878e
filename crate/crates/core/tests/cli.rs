mod common;

use common::fixture_path;
use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sumo-tff"));
    c.env_remove("SUMO_TFF_PROVER");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn fx(rel: &str) -> String {
    fixture_path(rel).display().to_string()
}

fn script(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, format!("#!/bin/sh\n{body}\n")).unwrap();
    std::fs::set_permissions(&p, std::fs::Permissions::from_mode(0o755)).unwrap();
    p
}

#[test]
fn translate_liquid_drop() {
    let o = run(&["translate", &fx("vocabulary.kif"), &fx("reference/liquid_drop.kif")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("$less(500.0,V__Size)"), "{}", stdout(&o));
    assert!(stderr(&o).contains("axioms out:"));
}

#[test]
fn translate_to_file_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let outs: Vec<String> = (0..2)
        .map(|i| {
            let path = dir.path().join(format!("out{i}.tff"));
            let o = run(&[
                "translate",
                &fx("vocabulary.kif"),
                &fx("robot_small.kif"),
                &fx("reference/remainder.kif"),
                "-o",
                path.to_str().unwrap(),
            ]);
            assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
            std::fs::read_to_string(path).unwrap()
        })
        .collect();
    assert!(!outs[0].is_empty());
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn empty_kb_gives_empty_problem() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.kif");
    std::fs::write(&empty, "; nothing here\n").unwrap();
    let o = run(&["translate", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!stdout(&o).contains("axiom,"), "{}", stdout(&o));
}

#[test]
fn excluded_type_is_dropped() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("imaginary.kif");
    std::fs::write(&f, "(=> (instance ?X ImaginaryNumber) (instance ?X Number))\n").unwrap();
    let o = run(&["translate", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("dropped: 1"), "{}", stderr(&o));
}

#[test]
fn unparsable_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.kif");
    std::fs::write(&f, "(=> (p ?X)").unwrap();
    assert_eq!(run(&["translate", f.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["translate", "/nonexistent/x.kif"]).status.code(), Some(2));
}

#[test]
fn check_exit_codes() {
    assert_eq!(run(&["check", &fx("ceiling_coerced.tff")]).status.code(), Some(0));
    let o = run(&["check", &fx("ceiling_uncoerced.tff")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!stderr(&o).is_empty());
    assert_eq!(run(&["check", &fx("neg_int.tff")]).status.code(), Some(1));
    assert_eq!(run(&["check", "/nonexistent/x.tff"]).status.code(), Some(2));
}

#[test]
fn prove_without_prover_exits_3() {
    let o = run(&["prove", "--prover", "/nonexistent/vampire", &fx("ceiling_coerced.tff")]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("SUMO_TFF_PROVER"), "{}", stderr(&o));
}

#[test]
fn prove_reports_status() {
    let dir = tempfile::tempdir().unwrap();
    let sat = script(dir.path(), "sat.sh", "echo '% SZS status Satisfiable for problem'");
    let o = run(&["prove", "--prover", sat.to_str().unwrap(), &fx("ceiling_coerced.tff")]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stdout(&o).contains("Satisfiable"));

    let thm = script(dir.path(), "thm.sh", "echo '% SZS status Unsatisfiable for problem'");
    let o = bin()
        .env("SUMO_TFF_PROVER", &thm)
        .args(["prove", &fx("vocabulary.kif"), &fx("robot_small.kif")])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn prove_timeout_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let slow = script(dir.path(), "slow.sh", "sleep 30");
    let o = run(&["prove", "--prover", slow.to_str().unwrap(), "--timeout", "1", &fx("ceiling_coerced.tff")]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn config_file_supplies_prover() {
    let dir = tempfile::tempdir().unwrap();
    let sat = script(dir.path(), "sat.sh", "echo '% SZS status CounterSatisfiable for problem'");
    let cfg = dir.path().join("sumo-tff.conf");
    std::fs::write(&cfg, format!("# test\nprover = {}\n", sat.display())).unwrap();
    let o = run(&["prove", "--config", cfg.to_str().unwrap(), &fx("ceiling_coerced.tff")]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stdout(&o).contains("CounterSatisfiable"));
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pgcl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pgcl"))
        .args(args)
        .env_remove("PGCL_GATE")
        .output()
        .expect("pgcl runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_writes_parseable_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("h.txt");
    let o = pgcl(&["build", "huppert", "--p", "5", "--out", path(&file)]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&file).unwrap();
    let g = pcgroup::format::parse_presentation(&text).unwrap();
    assert_eq!(g.order(), Some(5u128.pow(6)));

    let o = pgcl(&["build", "free-class2", "--p", "5", "--d", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("n 6"));

    let o = pgcl(&["build", "huppert", "--p", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn theorem_b_certificate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pres = dir.path().join("g.txt");
    let cert = dir.path().join("cert.json");
    let report = dir.path().join("report.json");
    assert!(pgcl(&["build", "huppert", "--out", path(&pres), "--quiet"])
        .status
        .success());
    let o = pgcl(&[
        "check",
        path(&pres),
        "theorem-b",
        "--cert-out",
        path(&cert),
        "--json",
        path(&report),
        "--quiet",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["schema"], 1);
    assert_eq!(r["verdict"], "PASS");
    assert!(r["groups"][0]["checks"][0]["details"]["certificate"].is_object());
    assert!(dir.path().join("report.json.timings.json").is_file());

    let o = pgcl(&["certify-replay", path(&cert), path(&pres)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));

    let mut c: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    let n = c["pairing"][2].as_array().unwrap().len();
    c["pairing"][2] = Value::from(vec![0; n]);
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, c.to_string()).unwrap();
    let o = pgcl(&["certify-replay", path(&tampered), path(&pres)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL rung 2"));

    let other = dir.path().join("other.txt");
    assert!(
        pgcl(&["build", "heisenberg", "--out", path(&other), "--quiet"])
            .status
            .success()
    );
    let o = pgcl(&["certify-replay", path(&cert), path(&other)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("REJECTED"));
}

#[test]
fn theorem_a_rejects_rank_six_and_finds_gap() {
    let o = pgcl(&["check", "free-class2", "--d", "4", "theorem-a", "k-gap"]);
    let out = stdout(&o);
    assert!(out.contains("REJECTED theorem-a"), "{out}");
    assert!(out.contains("PASS     k-gap/oracle"), "{out}");
    assert!(out.contains("PASS     k-gap/enumeration"), "{out}");
}

#[test]
fn large_quotient_is_skipped_not_passed() {
    let o = pgcl(&["check", "free-class2", "--d", "6", "k-gap", "lemma-d"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(3), "{out}");
    assert!(out.contains("SKIPPED  k-gap/enumeration"));
    assert!(out.contains("SKIPPED  lemma-d"));
}

#[test]
fn abelian_theorem_b_is_trivial() {
    let o = pgcl(&["check", "abelian", "theorem-b"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 rungs"));
}

#[test]
fn suite_names_ignore_case() {
    let o = pgcl(&["check", "heisenberg", "lemma-D", "consistency"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn gate_flag_turns_checks_into_skips() {
    let o = pgcl(&["check", "heisenberg", "lemma-d", "--gate", "25"]);
    assert_eq!(o.status.code(), Some(3));
    let o = Command::new(env!("CARGO_BIN_EXE_pgcl"))
        .args(["check", "heisenberg", "lemma-d"])
        .env("PGCL_GATE", "25")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn corpus_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"groups": []}"#).unwrap();
    let o = pgcl(&["corpus", "--config", path(&empty)]);
    assert_eq!(o.status.code(), Some(0));

    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "p 5\nn 3\npow 1 : g2\ncomm 2 1 : g3\n").unwrap();
    let cfg = dir.path().join("cfg.json");
    let body =
        serde_json::json!({ "groups": [path(&bad), "heisenberg"], "suites": ["consistency"] });
    std::fs::write(&cfg, body.to_string()).unwrap();
    let report = dir.path().join("r.json");
    let o = pgcl(&[
        "corpus",
        "--config",
        path(&cfg),
        "--json",
        path(&report),
        "--quiet",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let failed: Vec<&str> = r["groups"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|g| g["verdict"] == "FAIL")
        .map(|g| g["group"].as_str().unwrap())
        .collect();
    assert_eq!(failed, vec![path(&bad)]);
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"groups": ["heisenberg", "semidirect-cyclic"], "suites": ["consistency", "theorem-b", "honda"]}"#).unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (out, jobs) in [(&a, "1"), (&b, "4")] {
        let o = pgcl(&[
            "corpus",
            "--config",
            path(&cfg),
            "--json",
            path(out),
            "--jobs",
            jobs,
            "--seed",
            "9",
            "--quiet",
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "p 5\nn 3\ncomm 2 1 : h3\n").unwrap();
    let o = pgcl(&["check", path(&bad), "consistency"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3, column 12"));
    assert_eq!(
        pgcl(&["check", "heisenberg", "no-such-suite"])
            .status
            .code(),
        Some(2)
    );
}

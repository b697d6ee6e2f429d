use std::path::PathBuf;
use std::process::{Command, Output};

use divmon_core::Report;

fn sample(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "samples", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn divmon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divmon")).args(args).output().expect("spawn divmon")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Runs with `--report -` and parses the document.
fn report(args: &[&str]) -> (i32, Report) {
    let mut full = vec!["--report", "-"];
    full.extend_from_slice(args);
    let o = divmon(&full);
    let r = Report::parse(&stdout(&o)).expect("report parses");
    assert_eq!(r.get("exit_code"), Some(code(&o).to_string().as_str()));
    (code(&o), r)
}

#[test]
fn check_exit_codes() {
    assert_eq!(code(&divmon(&["check", &sample("divisibility.mon")])), 0);
    assert_eq!(code(&divmon(&["check", &sample("trace.mon")])), 0);
    let bad = divmon(&["check", &sample("bad.mon")]);
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("condition I: FAILED"), "{}", stdout(&bad));
    let malformed = divmon(&["check", &sample("malformed.mon")]);
    assert_eq!(code(&malformed), 2);
    assert!(String::from_utf8_lossy(&malformed.stderr).contains("line 2"));
    assert_eq!(code(&divmon(&["check", "/nonexistent/file.mon"])), 2);
    assert_eq!(code(&divmon(&["frobnicate"])), 2);
}

#[test]
fn check_report_names_failed_condition() {
    let (c, r) = report(&["check", &sample("bad.mon")]);
    assert_eq!(c, 1);
    assert_eq!(r.get("passed"), Some("false"));
    assert_ne!(r.get("condition.I.violations"), Some("0"));
    assert!(r.get("violation.0").unwrap().starts_with("I:"));
}

#[test]
fn construction_commands_are_gated() {
    let (c, r) = report(&["hypercubes", &sample("bad.mon")]);
    assert_eq!(c, 1);
    assert_eq!(r.get("check.passed"), Some("false"));
    let (c, r) = report(&["--assume-checked", "hypercubes", &sample("divisibility.mon")]);
    assert_eq!(c, 0);
    assert_eq!(r.get("check.skipped"), Some("true"));
}

#[test]
fn hypercube_counts() {
    for (file, n) in [("divisibility.mon", "5"), ("two.mon", "6"), ("cyclic.mon", "8")] {
        let (c, r) = report(&["hypercubes", &sample(file)]);
        assert_eq!(c, 0);
        assert_eq!(r.get("cubes"), Some(n), "{file}");
    }
}

#[test]
fn synthesize_and_reload() {
    let dir = tempfile::tempdir().unwrap();
    let machine = dir.path().join("shift.machine");
    let m = machine.to_str().unwrap();
    let (c, r) = report(&["synthesize", &sample("divisibility.mon"), "-o", m]);
    assert_eq!(c, 0);
    assert_eq!(r.get("states"), Some("5"));
    assert_eq!(r.get("arrows"), Some("15"));
    let text = std::fs::read_to_string(&machine).unwrap();
    assert!(text.contains("4 z -> 4 | x"), "{text}");

    let (_, r) = report(&["synthesize", "--augmented", &sample("two.mon")]);
    assert_eq!(r.get("arrows"), Some("36"));

    let dot = stdout(&divmon(&["synthesize", "--dot", &sample("divisibility.mon")]));
    assert!(dot.starts_with("digraph"));
}

#[test]
fn normalize_from_machine_matches_presentation() {
    let dir = tempfile::tempdir().unwrap();
    let machine = dir.path().join("two.machine");
    let m = machine.to_str().unwrap();
    assert_eq!(code(&divmon(&["synthesize", &sample("two.mon"), "-o", m])), 0);
    for w in ["yzyxxz", "xxyyzz", "zyxzyx", "x", ""] {
        let (_, a) = report(&["normalize", m, w]);
        let (_, b) = report(&["normalize", &sample("two.mon"), w]);
        assert_eq!(a.get("normal"), b.get("normal"), "{w}");
        assert_eq!(a.get("runs"), b.get("runs"), "{w}");
    }
    let o = divmon(&["normalize", &sample("two.mon"), "yzyxxz", "--stats"]);
    assert_eq!(stdout(&o), "[x y].y.y.[y z]\nruns: 4\nsteps: 15\n");
    assert_eq!(stdout(&divmon(&["normalize", m, ""])), "1\n");
    assert_eq!(code(&divmon(&["normalize", m, "xq"])), 2);
}

#[test]
fn equal_words() {
    assert_eq!(code(&divmon(&["equal", &sample("two.mon"), "yzyxxz", "xxyyzz"])), 0);
    assert_eq!(code(&divmon(&["equal", &sample("two.mon"), "xyz", "xyz"])), 0);
    let (c, r) = report(&["equal", &sample("two.mon"), "xy", "yx"]);
    assert_eq!(c, 1);
    assert_eq!(r.get("equal"), Some("false"));
}

#[test]
fn graph_queries() {
    let (_, r) = report(&["graph", &sample("cyclic.mon"), "--reach", "[x z]", "x", "--scc"]);
    assert_eq!(r.get("reachable"), Some("false"));
    assert_eq!(r.get("strongly_connected"), Some("false"));
    assert_eq!(r.get("scc.vertices").unwrap().split(", ").count(), 6);
    let (_, r) = report(&["graph", &sample("cyclic.mon"), "--reach", "x", "x"]);
    assert_eq!(r.get("reachable"), Some("true"));
    assert_eq!(code(&divmon(&["graph", &sample("cyclic.mon"), "--reach", "[x q]", "x"])), 2);
    assert!(stdout(&divmon(&["graph", &sample("cyclic.mon"), "--dot"])).starts_with("digraph"));
}

#[test]
fn automatic_structure() {
    let (c, r) = report(&["automatic", &sample("divisibility.mon"), "--sweep", "4"]);
    assert_eq!(c, 0);
    assert_eq!(r.get("passed"), Some("true"));
    let bound: usize = r.get("right.bound").unwrap().parse().unwrap();
    for i in 0..5 {
        let states: usize = r.get(&format!("right.{i}.states")).unwrap().parse().unwrap();
        assert!(states <= bound);
        assert_eq!(r.get(&format!("left.{i}.sweep.mismatches")), Some("0"));
    }
    let (c, r) = report(&[
        "automatic",
        &sample("two.mon"),
        "--multiplier",
        "[y z]",
        "--side",
        "right",
        "--sweep",
        "5",
    ]);
    assert_eq!(c, 0);
    let (key, _) = r.entries().find(|&(k, v)| k.ends_with(".cube") && v == "[y z]").unwrap();
    let prefix = key.trim_end_matches(".cube");
    assert!(prefix.starts_with("right."));
    assert_eq!(r.get(&format!("{prefix}.sweep.mismatches")), Some("0"));
    assert!(!r.entries().any(|(k, _)| k.starts_with("left.")));
    let dot = stdout(&divmon(&["automatic", &sample("two.mon"), "--multiplier", "x", "--side", "left", "--dot"]));
    assert!(dot.starts_with("digraph"));
}

#[test]
fn verify_passes_and_catches_corruption() {
    let (c, r) = report(&["verify", &sample("divisibility.mon"), "--max-len", "5"]);
    assert_eq!(c, 0, "{r}");
    assert_eq!(r.get("passed"), Some("true"));

    let dir = tempfile::tempdir().unwrap();
    let machine = dir.path().join("bad.machine");
    let text = stdout(&divmon(&["synthesize", &sample("divisibility.mon")]));
    let tampered = text.replace("4 z -> 4 | x", "4 z -> 4 | y");
    assert_ne!(text, tampered);
    std::fs::write(&machine, tampered).unwrap();
    let (c, r) = report(&[
        "verify",
        &sample("divisibility.mon"),
        "--max-len",
        "4",
        "--machine",
        machine.to_str().unwrap(),
    ]);
    assert_eq!(c, 1);
    assert_ne!(r.get("transducer-oracle.failures"), Some("0"));
}

#[test]
fn bench_scaling() {
    let (c, r) = report(&["bench", &sample("two.mon"), "--max-n", "256"]);
    assert_eq!(c, 0);
    assert_eq!(r.get("power.0.steps"), Some("0"));
    let steps = |n: usize| -> usize { r.get(&format!("power.{n}.steps")).unwrap().parse().unwrap() };
    let mut n = 1;
    while n < 256 {
        assert!(steps(n) <= steps(2 * n));
        n *= 2;
    }
    assert!(steps(256) <= 256 * 257 / 2);
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["check", "bad.mon"],
        vec!["hypercubes", "cyclic.mon"],
        vec!["normalize", "two.mon", "zzyyxx"],
    ] {
        let mut a = args.clone();
        let path = sample(a[1]);
        a[1] = &path;
        let first = stdout(&divmon(&[&["--report", "-"], a.as_slice()].concat()));
        let second = stdout(&divmon(&[&["--report", "-", "--jobs", "2"], a.as_slice()].concat()));
        assert_eq!(first, second);
    }
}

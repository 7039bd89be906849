use std::path::PathBuf;
use std::process::{Command, Output};

const PANTS: &str = r#"{"genus": 0, "boundary_components": 3, "punctures": 0}"#;
const TORUS: &str = r#"{"genus": 1, "boundary_components": 1, "punctures": 0}"#;

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lengthpairs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn lengthpairs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lengthpairs"))
        .args(args)
        .env("LENGTHPAIRS_THREADS", "2")
        .output()
        .unwrap()
}

fn run_config(name: &str, body: &str, extra: &[&str]) -> Output {
    let p = scratch(name, body);
    let mut args = vec!["run", p.to_str().unwrap()];
    args.extend_from_slice(extra);
    lengthpairs(&args)
}

#[test]
fn trace_id_succeeds() {
    let out = run_config(
        "trace.json",
        &format!(r#"{{"surface": {PANTS}, "task": "trace-id", "n_range": [1, 12]}}"#),
        &["--format", "csv"],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 13);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(1) == Some("true")));
}

#[test]
fn config_error_exit_code() {
    let out = run_config("empty.json", &format!(r#"{{"surface": {PANTS}, "task": "pairs"}}"#), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config error"));
    let out = run_config("tol.json", &format!(r#"{{"surface": {PANTS}, "words": {{"alpha": "ab"}}, "task": "verify", "tol": 0.5}}"#), &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = lengthpairs(&["run", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_config("task.json", &format!(r#"{{"surface": {PANTS}, "task": "trace-id"}}"#), &["--task", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_error_exit_code() {
    let out = run_config(
        "unwritable.json",
        &format!(r#"{{"surface": {PANTS}, "task": "trace-id"}}"#),
        &["--out", "/nonexistent/dir/report.json"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn inconclusive_exit_code() {
    let out = run_config(
        "inconclusive.json",
        &format!(r#"{{"surface": {TORUS}, "words": {{"x": "ab"}}, "task": "filling", "scc_word_bound": 1}}"#),
        &[],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verification_failure_exit_code() {
    let out = run_config(
        "simple.json",
        &format!(r#"{{"surface": {PANTS}, "words": {{"alpha": "a"}}, "task": "verify"}}"#),
        &[],
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn overrides_and_output_file() {
    let target = std::env::temp_dir().join(format!("lengthpairs-out-{}.json", std::process::id()));
    let out = run_config(
        "override.json",
        &format!(r#"{{"surface": {TORUS}, "task": "trace-id"}}"#),
        &["--task", "sample-reps", "--seed", "5", "--seed", "6", "--out", target.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report = std::fs::read_to_string(&target).unwrap();
    assert!(report.contains("\"task\": \"sample-reps\""));
    assert!(report.contains("\"seed\": 6"));
    std::fs::remove_file(target).unwrap();
}

#[test]
fn json_is_byte_stable() {
    let body = format!(r#"{{"surface": {PANTS}, "words": {{"alpha": "ab"}}, "task": "verify", "seeds": [0, 1, 2], "n_range": [1, 5]}}"#);
    let a = run_config("stable.json", &body, &[]);
    let b = run_config("stable.json", &body, &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn text_report_lists_threshold_and_verdicts() {
    let out = run_config(
        "text.json",
        &format!(r#"{{"surface": {PANTS}, "words": {{"alpha": "ab"}}, "task": "verify", "n_range": [1, 4]}}"#),
        &["--format", "text"],
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("observed N = 1"));
    for n in 2..=4 {
        assert!(text.contains(&format!("n = {n}: length_equivalent = true, filling = yes/yes")));
    }
}

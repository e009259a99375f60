//! End-to-end runs of the `gqe` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use gqe_core::parser::{parse_problem, print_problem};

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn gqe(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gqe"));
    cmd.args(args)
        .env_remove("GQE_MAX_CLAUSES")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("spawn gqe");
    {
        let mut input = child.stdin.take().expect("stdin");
        input.write_all(stdin.unwrap_or("").as_bytes()).expect("write stdin");
    }
    child.wait_with_output().expect("gqe output")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).expect("write temp file");
    p.to_string_lossy().into_owned()
}

#[test]
fn loop_set_is_unsat_with_proof() {
    let dir = tempfile::tempdir().unwrap();
    let prec = write_temp(&dir, "prec", "f > g > a > b > bq > a1 > a2 > a3 > dd > g1 > g2 > g3\n");
    let input = golden("loop.gqe");
    let o = gqe(&[input.to_str().unwrap(), "--proof", "--precedence", &prec], None);
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("UNSAT\n"));
    assert!(out.contains("~g2(a) [TRes"), "{out}");
    assert!(out.trim_end().ends_with("$false [Res, (8,12), {}]"), "{out}");
}

#[test]
fn answer_from_data() {
    let o = gqe(&["--mode", "answer"], Some("data.\na(c0,c1).\nquery.\nexists X,Y . a(X,Y).\n"));
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "YES exists X,Y . a(X,Y)\n");
}

#[test]
fn answers_follow_the_theory() {
    let o = gqe(&["--mode", "answer", golden("answer.gqe").to_str().unwrap()], None);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "YES exists X,Y . a(X,Y)\nYES exists X . s(X)\nNO exists X . t(X)\n"
    );
}

#[test]
fn rewrite_without_theory_returns_the_query() {
    let o = gqe(&["--mode", "rewrite"], Some("query.\nexists X . a(X).\n"));
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "NO exists X . a(X)\n% branch 1\nexists X0 . a(X0).\n");
}

#[test]
fn satisfiable_theory_exits_zero() {
    let o = gqe(&[golden("f6.gqe").to_str().unwrap()], None);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "SAT\n");
}

#[test]
fn parse_errors_exit_two_with_position() {
    let o = gqe(&[], Some("clauses.\np(X) |.\n"));
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("2:7"), "{err}");
}

#[test]
fn unguarded_theory_is_an_input_error() {
    let o = gqe(&[golden("mixed.gqe").to_str().unwrap()], None);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not (loosely) guarded"));
}

#[test]
fn missing_queries_and_files_are_input_errors() {
    let o = gqe(&["--mode", "answer", golden("loop.gqe").to_str().unwrap()], None);
    assert_eq!(code(&o), 2);
    let o = gqe(&["/nonexistent/problem.gqe"], None);
    assert_eq!(code(&o), 2);
}

#[test]
fn clause_limit_exits_three() {
    let input = golden("loop.gqe");
    let o = gqe(&[input.to_str().unwrap(), "--max-clauses", "5"], None);
    assert_eq!(code(&o), 3);
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gqe"));
    let o = cmd
        .arg(input.to_str().unwrap())
        .env("GQE_MAX_CLAUSES", "5")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn subsumption_does_not_change_the_verdict() {
    let input = golden("loop.gqe");
    let o = gqe(&[input.to_str().unwrap(), "--no-subsumption"], None);
    assert_eq!(code(&o), 1);
}

#[test]
fn output_is_deterministic() {
    let answer = golden("answer.gqe");
    let f6 = golden("f6.gqe");
    let looped = golden("loop.gqe");
    let runs: [Vec<&str>; 4] = [
        vec!["--mode", "answer", "--proof", answer.to_str().unwrap()],
        vec!["--mode", "rewrite", f6.to_str().unwrap()],
        vec!["--mode", "rewrite", "--json", answer.to_str().unwrap()],
        vec!["--proof", "--json", "--no-subsumption", looped.to_str().unwrap()],
    ];
    for args in &runs {
        let strip = |o: &Output| -> String {
            if args.contains(&"--json") {
                let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
                remove_stats(&mut v);
                v.to_string()
            } else {
                stdout(o)
            }
        };
        let a = gqe(args, None);
        let b = gqe(args, None);
        assert_eq!(code(&a), code(&b));
        assert_eq!(strip(&a), strip(&b), "{args:?}");
    }
}

fn remove_stats(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(m) => {
            m.remove("stats");
            m.values_mut().for_each(remove_stats);
        }
        serde_json::Value::Array(xs) => xs.iter_mut().for_each(remove_stats),
        _ => {}
    }
}

#[test]
fn json_report_shape() {
    let o = gqe(
        &["--mode", "answer", "--json"],
        Some("data.\na(c0,c1).\nquery.\nexists X,Y . a(X,Y).\n"),
    );
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["mode"], "answer");
    let r = &v["results"][0];
    assert_eq!(r["verdict"], "YES");
    assert_eq!(r["query"], "exists X,Y . a(X,Y)");
    let steps = r["proofs"][0].as_array().unwrap();
    assert_eq!(steps.last().unwrap()["clause"], "$false");
    assert_eq!(steps.last().unwrap()["rule"], "TRes");
    assert_eq!(steps.last().unwrap()["mgu"]["X0"], "c0");
    assert!(r["stats"]["saturation"]["activated"].is_u64());

    let o = gqe(&["--json", golden("loop.gqe").to_str().unwrap()], None);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "UNSAT");
    assert!(v["proof"].as_array().is_some_and(|p| !p.is_empty()));
}

#[test]
fn golden_files_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut seen = 0;
    for e in fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        if path.extension().is_some_and(|x| x == "gqe") {
            let text = fs::read_to_string(&path).unwrap();
            let p = parse_problem(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(print_problem(&p), text, "{}", path.display());
            seen += 1;
        }
    }
    assert!(seen >= 4);
}

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rrcheck"))
}

fn scenarios(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("each line is JSON")).collect()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn passing_grid_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("hrr.json");
    let g = run(&["grid", "hrr", "--out", grid.to_str().unwrap()]);
    assert!(g.status.success());

    let out = run(&["verify", grid.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let reports = lines(&out);
    let summary = &reports.last().unwrap()["summary"];
    assert_eq!(summary["failed"], 0);
    assert_eq!(summary["errored"], 0);
    assert_eq!(summary["passed"], 189);
    assert_eq!(reports.len(), 190);
}

#[test]
fn shipped_examples_pass() {
    let out = run(&["verify", scenarios("examples.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn localization_failure_exits_one() {
    let out = run(&["verify", scenarios("localization_failure.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let reports = lines(&out);
    assert_eq!(reports[0]["equal"], false);
    let note = reports[0]["notes"][0].as_str().unwrap();
    assert!(note.contains("localization criterion failed"), "{note}");
    assert_eq!(reports[1]["summary"]["errored"], 1);
}

#[test]
fn failed_check_exits_one() {
    let out = run(&["verify", scenarios("todd_perturbed.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let reports = lines(&out);
    assert_eq!(reports[0]["lhs"], "5/3");
    assert_eq!(reports[0]["rhs"], "2");
    assert_eq!(reports[1]["summary"]["failed"], 1);
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let malformed = write_temp(&dir, "bad.json", "{\"kind\": \"hrr\",");
    let unknown = write_temp(&dir, "unknown.json", r#"{"kind": "serre_duality"}"#);
    let missing_field = write_temp(&dir, "missing.json", r#"{"kind": "grr_embedding", "m": 1}"#);
    for path in [malformed.as_str(), unknown.as_str(), missing_field.as_str(), "/definitely/not/here.json"] {
        let out = run(&["verify", path]);
        assert_eq!(out.status.code(), Some(2), "{path}");
        assert!(out.stdout.is_empty());
    }
    // one bad file spoils the batch before anything runs
    let out = run(&["verify", scenarios("examples.json").to_str().unwrap(), unknown.as_str()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_deterministic_and_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("eq.json");
    assert!(run(&["grid", "equivariant_grr", "--out", grid.to_str().unwrap()]).status.success());
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let c = dir.path().join("c.jsonl");
    let g = grid.to_str().unwrap();
    assert_eq!(run(&["verify", g, "--out", a.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(run(&["verify", g, "--out", b.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(run(&["verify", g, "--sequential", "--out", c.to_str().unwrap()]).status.code(), Some(0));
    let (a, b, c) = (fs::read(a).unwrap(), fs::read(b).unwrap(), fs::read(c).unwrap());
    assert_eq!(a, b);
    assert_eq!(a, c);

    let input: Vec<Value> = serde_json::from_str(&fs::read_to_string(&grid).unwrap()).unwrap();
    let output: Vec<Value> = String::from_utf8(a).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    for (i, o) in input.iter().zip(&output) {
        assert_eq!(i["id"], o["id"]);
    }
}

#[test]
fn fail_fast_stops_at_first_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "mixed.json",
        r#"[{"kind": "dexp", "N": 2},
            {"kind": "atiyah_bott", "n": 1, "blocks": [{"alpha": "3"}, {"alpha": "3"}], "k": 1},
            {"kind": "dexp", "N": 3}]"#,
    );
    let out = run(&["verify", "--fail-fast", &path]);
    assert_eq!(out.status.code(), Some(1));
    let reports = lines(&out);
    assert_eq!(reports.len(), 3);
    assert_eq!(reports[2]["summary"]["passed"], 1);
    assert_eq!(reports[2]["summary"]["errored"], 1);

    let out = run(&["verify", &path]);
    assert_eq!(lines(&out).len(), 4);
}

#[test]
fn verbose_reports_on_stderr() {
    let out = run(&["verify", "-v", scenarios("todd_perturbed.json").to_str().unwrap()]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("FAIL"), "{err}");
    assert!(err.contains("0 passed, 1 failed, 0 errored"), "{err}");
}

#[test]
fn compute_classes() {
    let out = run(&["compute", "td", scenarios("payloads/td_p2.json").to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        r#"{"terms":[{"coeff":"1","exps":[0]},{"coeff":"3/2","exps":[1]},{"coeff":"1","exps":[2]}]}"#
    );
    let out = run(&["compute", "ch", scenarios("payloads/ch_p1_o2.json").to_str().unwrap()]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        r#"{"terms":[{"coeff":"1","exps":[0]},{"coeff":"2","exps":[1]}]}"#
    );
    let out = run(&["compute", "euler", scenarios("payloads/euler_empty.json").to_str().unwrap()]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), r#"{"terms":[{"coeff":"1","exps":[0]}]}"#);
    let out = run(&["compute", "eqch", scenarios("payloads/eqch_p1.json").to_str().unwrap()]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        r#"{"terms":[{"coeff":"5/3","exps":[0]},{"coeff":"20/3","exps":[1]}]}"#
    );
}

#[test]
fn compute_rejects_malformed_payloads() {
    let dir = tempfile::tempdir().unwrap();
    let not_json = write_temp(&dir, "a.json", "factors: [2]");
    let no_bundle = write_temp(&dir, "b.json", r#"{"variety": {"factors": [1]}}"#);
    let bad_chern =
        write_temp(&dir, "c.json", r#"{"factors": [1], "rank": 1, "chern": {"terms": [{"exps": [0], "coeff": "2"}]}}"#);
    for (kind, path) in [("td", &not_json), ("ch", &no_bundle), ("ch", &bad_chern), ("euler", &no_bundle)] {
        let out = run(&["compute", kind, path]);
        assert_eq!(out.status.code(), Some(2), "{kind} {path}");
    }
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use xuml_testkit::Fixture;

fn xuml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xuml")).args(args).output().expect("run xuml")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const EMPTY_MODEL: &str = r#"{"classes":[],"relations":[],"generalizations":[]}"#;
const EMPTY_BUNDLE: &str = r#"{"methods":[]}"#;

#[test]
fn validate_empty_inputs_is_silent() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        xuml(&["validate", &write(dir.path(), "m.json", EMPTY_MODEL), &write(dir.path(), "c.json", EMPTY_BUNDLE)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty() && out.stderr.is_empty());
}

#[test]
fn validate_reports_model_and_body_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad_model = r#"{"classes":[{"name":"A","attributes":[{"name":"x","type":"Integer"},{"name":"x","type":"Real"}],"methods":[]}]}"#;
    let out = xuml(&["validate", &write(dir.path(), "m.json", bad_model), &write(dir.path(), "c.json", EMPTY_BUNDLE)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains('x'));

    let model = r#"{"classes":[{"name":"A","attributes":[],"methods":[{"name":"go","static":true,"params":[],"returns":null}]}]}"#;
    let bundle = r#"{"methods":[{"class":"A","method":"go","code":"x = ;\ny = 1;\nend if;"}]}"#;
    let out = xuml(&["validate", &write(dir.path(), "m2.json", model), &write(dir.path(), "c2.json", bundle)]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.lines().filter(|l| l.starts_with("A.go:")).count() >= 2, "{stderr}");
    assert!(out.stdout.is_empty());
}

#[test]
fn run_prints_only_the_snapshot() {
    let fx = Fixture::load("observer");
    let out = xuml(&[
        "run",
        "--model",
        p(&fx.path("model.json")),
        "--methods",
        p(&fx.path("methods.json")),
        "--entry",
        "Subject.Run",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (snapshot, _) = fx.execute();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), snapshot.to_json() + "\n");
}

#[test]
fn failed_run_exits_one_and_still_prints_the_snapshot() {
    let fx = Fixture::load("failure_division");
    let out = xuml(&[
        "run",
        "--model",
        p(&fx.path("model.json")),
        "--methods",
        p(&fx.path("methods.json")),
        "--entry",
        &fx.run.entry(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"status\":\"failed\""));
    assert!(String::from_utf8_lossy(&out.stderr).contains("division-by-zero"));
}

#[test]
fn max_steps_bounds_the_run() {
    let fx = Fixture::load("recursion");
    let (model, methods) = (fx.path("model.json"), fx.path("methods.json"));
    let out =
        xuml(&["run", "--model", p(&model), "--methods", p(&methods), "--entry", "Math.Main", "--max-steps", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step-budget-exhausted"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(xuml(&[]).status.code(), Some(2));
    assert_eq!(xuml(&["run", "--model", "m.json"]).status.code(), Some(2));
    let fx = Fixture::load("observer");
    let model = fx.path("model.json");
    let methods = fx.path("methods.json");
    let base = ["run", "--model", p(&model), "--methods", p(&methods)];
    assert_eq!(xuml(&[&base[..], &["--entry", "NoDot"]].concat()).status.code(), Some(2));
    assert_eq!(xuml(&[&base[..], &["--entry", "Subject.Run", "--args", "[3]"]].concat()).status.code(), Some(2));
    assert_eq!(xuml(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_files_exit_one() {
    let out = xuml(&["validate", "/nonexistent/m.json", "/nonexistent/c.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}

#[test]
fn unknown_entry_exits_one() {
    let fx = Fixture::load("observer");
    let out = xuml(&[
        "run",
        "--model",
        p(&fx.path("model.json")),
        "--methods",
        p(&fx.path("methods.json")),
        "--entry",
        "Subject.Nope",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown-entry"));
    assert!(out.stdout.is_empty());
}

#[test]
fn gen_without_entry_dumps_initial_state() {
    let dir = tempfile::tempdir().unwrap();
    let py = dir.path().join("out.py");
    let out = xuml(&[
        "gen",
        "--model",
        &write(dir.path(), "m.json", EMPTY_MODEL),
        "--methods",
        &write(dir.path(), "c.json", EMPTY_BUNDLE),
        "-o",
        p(&py),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let got = xuml_testkit::python::stdout_of(&fs::read_to_string(&py).unwrap()).unwrap();
    assert_eq!(got, "{\"instances\":[],\"links\":[],\"status\":\"finished\",\"return_value\":null}\n");
}

#[test]
fn model_files_are_sniffed_by_content() {
    let dir = tempfile::tempdir().unwrap();
    let xmi =
        fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/park_ea.xmi")).unwrap();
    let out = xuml(&["validate", &write(dir.path(), "model.txt", &xmi), &write(dir.path(), "c.json", EMPTY_BUNDLE)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

//! One line per acceptance criterion. Runs the `xuml` binary end to end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output, Stdio};
use std::time::{Duration, Instant};

use xuml_core::ingest::load_method_bundle;
use xuml_core::oal::{parse_method_body, pretty_print, tokenize};
use xuml_core::runtime::{self, SessionOptions};
use xuml_core::trace::{check_trace, parse_log};
use xuml_stepd::protocol::event_payload;
use xuml_testkit::fuzz::fuzz_inputs;
use xuml_testkit::gen::{random_ast, random_program};
use xuml_testkit::{python, Fixture};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn xuml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xuml")).args(args).output().expect("run xuml")
}

fn p(path: &Path) -> &str {
    path.to_str().expect("utf-8 path")
}

fn args_json(fx: &Fixture) -> String {
    format!("[{}]", fx.run.args.iter().map(|v| v.to_json()).collect::<Vec<_>>().join(","))
}

/// `xuml run` on a fixture; returns (stdout, trace bytes).
fn run_fixture(fx: &Fixture, trace: &Path) -> (Vec<u8>, Vec<u8>) {
    let budget = fx.run.budget().to_string();
    let args = args_json(fx);
    let out = xuml(&[
        "run",
        "--model",
        p(&fx.path("model.json")),
        "--methods",
        p(&fx.path("methods.json")),
        "--entry",
        &fx.run.entry(),
        "--args",
        &args,
        "--trace",
        p(trace),
        "--max-steps",
        &budget,
    ]);
    (out.stdout, fs::read(trace).expect("trace written"))
}

fn differential(dir: &Path) -> Check {
    let fixtures = Fixture::all();
    for required in ["observer", "park_ranger"] {
        if !fixtures.iter().any(|f| f.name == required) {
            return Err(format!("fixture {required} missing"));
        }
    }
    if fixtures.len() < 10 {
        return Err(format!("only {} fixtures", fixtures.len()));
    }
    let started = Instant::now();
    for fx in &fixtures {
        let (snapshot, _) = run_fixture(fx, &dir.join(format!("{}.jsonl", fx.name)));
        let py = dir.join(format!("{}.py", fx.name));
        let budget = fx.run.budget().to_string();
        let args = args_json(fx);
        let gen = xuml(&[
            "gen",
            "--model",
            p(&fx.path("model.json")),
            "--methods",
            p(&fx.path("methods.json")),
            "-o",
            p(&py),
            "--entry",
            &fx.run.entry(),
            "--args",
            &args,
            "--max-steps",
            &budget,
        ]);
        if !gen.status.success() {
            return Err(format!("{}: gen failed: {}", fx.name, String::from_utf8_lossy(&gen.stderr)));
        }
        let out = Command::new(python::PYTHON).arg(&py).output().map_err(|e| e.to_string())?;
        if out.stdout != snapshot {
            return Err(format!("{}: python snapshot differs", fx.name));
        }
    }
    let elapsed = started.elapsed();
    if elapsed > Duration::from_secs(10) {
        return Err(format!("corpus took {elapsed:?}"));
    }
    Ok(format!("{} fixtures byte-identical in {:.2}s", fixtures.len(), elapsed.as_secs_f64()))
}

fn trace_well_formed(dir: &Path) -> Check {
    let fixtures = Fixture::all();
    for fx in &fixtures {
        let (_, trace) = run_fixture(fx, &dir.join(format!("{}.wf.jsonl", fx.name)));
        let events = parse_log(&String::from_utf8_lossy(&trace)).map_err(|e| format!("{}: {e}", fx.name))?;
        let violations = check_trace(&events);
        if !violations.is_empty() {
            return Err(format!("{}: {:?}", fx.name, violations[0]));
        }
    }
    let started = Instant::now();
    for seed in 0..1000 {
        let program = random_program(seed);
        let (class, method) = &program.entry;
        let options = SessionOptions { step_budget: 5_000 };
        let (_, events) = runtime::run(program.fused(), class, method, program.args.clone(), options)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        let violations = check_trace(&events);
        if !violations.is_empty() {
            return Err(format!("seed {seed}: {:?}", violations[0]));
        }
    }
    let elapsed = started.elapsed();
    if elapsed > Duration::from_secs(60) {
        return Err(format!("random programs took {elapsed:?}"));
    }
    Ok(format!(
        "0 violations on {} corpus traces and 1000 random programs ({:.2}s)",
        fixtures.len(),
        elapsed.as_secs_f64()
    ))
}

fn determinism(dir: &Path) -> Check {
    let fixtures = Fixture::all();
    for fx in &fixtures {
        let first = run_fixture(fx, &dir.join(format!("{}.a.jsonl", fx.name)));
        let second = run_fixture(fx, &dir.join(format!("{}.b.jsonl", fx.name)));
        if first != second {
            return Err(format!("{}: runs differ", fx.name));
        }
    }
    Ok(format!("{} fixtures, identical trace and snapshot bytes across runs", fixtures.len()))
}

fn round_trip() -> Check {
    let mut bodies = 0;
    for fx in Fixture::all() {
        for entry in load_method_bundle(&fx.methods_json).map_err(|e| e.to_string())?.entries {
            let ast = parse_method_body(&entry.code).map_err(|d| format!("{}: {d:?}", fx.name))?.without_spans();
            let again = parse_method_body(&pretty_print(&ast)).map_err(|d| format!("{d:?}"))?.without_spans();
            if again != ast {
                return Err(format!("{}: {}.{} not a fixed point", fx.name, entry.class, entry.method));
            }
            bodies += 1;
        }
    }
    for seed in 0..1000 {
        let ast = random_ast(seed, 3).without_spans();
        let text = pretty_print(&ast);
        let again = parse_method_body(&text).map_err(|d| format!("seed {seed}: {d:?}"))?.without_spans();
        if again != ast || pretty_print(&again) != text {
            return Err(format!("generated ast {seed} not a fixed point"));
        }
    }
    let mut slowest = Duration::ZERO;
    for (class, text) in fuzz_inputs(11) {
        let started = Instant::now();
        let _ = tokenize(&text);
        let _ = parse_method_body(&text);
        let elapsed = started.elapsed();
        if elapsed > Duration::from_secs(10) {
            return Err(format!("fuzz class {class} took {elapsed:?}"));
        }
        slowest = slowest.max(elapsed);
    }
    Ok(format!(
        "{bodies} corpus bodies, 1000 generated ASTs, 64 KiB fuzz (slowest class {:.3}s)",
        slowest.as_secs_f64()
    ))
}

fn entry_gate(dir: &Path) -> Check {
    let model = dir.join("gate_model.json");
    let methods = dir.join("gate_methods.json");
    fs::write(
        &model,
        r#"{"classes":[{"name":"Subject","attributes":[],"methods":[{"name":"Run","static":false,"params":[],"returns":null}]}],"relations":[],"generalizations":[]}"#,
    )
    .map_err(|e| e.to_string())?;
    fs::write(&methods, r#"{"methods":[{"class":"Subject","method":"Run","code":"// nothing yet\n"}]}"#)
        .map_err(|e| e.to_string())?;
    let out = xuml(&["run", "--model", p(&model), "--methods", p(&methods), "--entry", "Subject.Run"]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    match out.status.code() {
        Some(1) if stderr.contains("at least one command") && stderr.contains("empty-body-entry") => {
            Ok("empty-bodied entry rejected with empty-body-entry".into())
        }
        code => Err(format!("exit {code:?}, stderr: {stderr}")),
    }
}

fn xmi_import(dir: &Path) -> Check {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures");
    let out_path = dir.join("park.json");
    let out = xuml(&["import-xmi", p(&fixtures.join("park_ea.xmi")), "-o", p(&out_path)]);
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let golden = fs::read(fixtures.join("park_ea.golden.json")).map_err(|e| e.to_string())?;
    if fs::read(&out_path).map_err(|e| e.to_string())? != golden {
        return Err("imported model differs from golden".into());
    }
    Ok("EA export (3 classes, 1 generalization, 1 association) matches golden Model JSON".into())
}

fn stream_batch(dir: &Path) -> Check {
    let fixtures = Fixture::all();
    for fx in &fixtures {
        let (_, trace) = run_fixture(fx, &dir.join(format!("{}.sb.jsonl", fx.name)));
        let budget = fx.run.budget().to_string();
        let mut child = Command::new(env!("CARGO_BIN_EXE_xuml"))
            .args(["serve", "--stdio", "--model", p(&fx.path("model.json")), "--methods", p(&fx.path("methods.json"))])
            .args(["--max-steps", &budget])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| e.to_string())?;
        let requests = format!(
            "{{\"id\":1,\"cmd\":\"start\",\"entry\":\"{}\",\"args\":{}}}\n{{\"id\":2,\"cmd\":\"continue\"}}\n",
            fx.run.entry(),
            args_json(fx)
        );
        child.stdin.take().expect("stdin").write_all(requests.as_bytes()).map_err(|e| e.to_string())?;
        let out = child.wait_with_output().map_err(|e| e.to_string())?;
        let streamed: String =
            String::from_utf8_lossy(&out.stdout).lines().filter_map(event_payload).map(|e| format!("{e}\n")).collect();
        if streamed.as_bytes() != trace.as_slice() {
            return Err(format!("{}: streamed events differ from batch trace", fx.name));
        }
    }
    Ok(format!("{} fixtures, stdio event lines byte-identical to batch traces", fixtures.len()))
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().expect("temp dir");
    let dir: PathBuf = tmp.path().to_path_buf();
    if !python::available() {
        println!("FAIL differential-oracle: python3 not found");
    }
    let checks: [Criterion; 7] = [
        ("differential-oracle", Box::new(|| differential(&dir))),
        ("trace-well-formedness", Box::new(|| trace_well_formed(&dir))),
        ("determinism", Box::new(|| determinism(&dir))),
        ("parser-round-trip", Box::new(round_trip)),
        ("entry-gate", Box::new(|| entry_gate(&dir))),
        ("xmi-import", Box::new(|| xmi_import(&dir))),
        ("stream-batch-equivalence", Box::new(|| stream_batch(&dir))),
    ];
    let mut failed = 0;
    for (name, check) in checks.iter() {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("acceptance: {}/{} passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

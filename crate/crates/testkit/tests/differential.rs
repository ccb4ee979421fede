use std::time::Instant;

use xuml_core::codegen::{generate_program, Entry, GenOptions};
use xuml_core::runtime::{self, SessionOptions};
use xuml_testkit::gen::random_program;
use xuml_testkit::{python, Fixture};

const RANDOM_BUDGET: u64 = 5_000;

#[test]
fn corpus_matches_generated_python() {
    assert!(python::available(), "python3 is required");
    let fixtures = Fixture::all();
    assert!(fixtures.len() >= 10);
    let started = Instant::now();
    for fx in &fixtures {
        let (snapshot, _) = fx.execute();
        let expected = snapshot.to_json() + "\n";
        let unit = fx.generate();
        let got = python::stdout_of(&unit.source).unwrap_or_else(|e| panic!("{}: {e}", fx.name));
        assert_eq!(got, expected, "{}", fx.name);
    }
    assert!(started.elapsed().as_secs_f64() < 10.0, "corpus took {:?}", started.elapsed());
}

#[test]
fn random_programs_match_generated_python() {
    for seed in 0..120 {
        let program = random_program(seed);
        let fused = program.fused();
        assert!(!fused.has_errors(), "seed {seed}: {:?}", fused.diagnostics);
        let (class, method) = &program.entry;
        let options = SessionOptions { step_budget: RANDOM_BUDGET };
        let (snapshot, _) = runtime::run(fused.clone(), class, method, program.args.clone(), options)
            .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let entry = Entry { class: class.clone(), method: method.clone(), args: program.args.clone() };
        let gen = GenOptions { step_budget: RANDOM_BUDGET, ..GenOptions::default() };
        let unit = generate_program(&fused, Some(&entry), gen).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let got = python::stdout_of(&unit.source).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert_eq!(got, snapshot.to_json() + "\n", "seed {seed}\n{}", unit.source);
    }
}

use std::time::Instant;

use xuml_core::runtime::{self, SessionOptions, Status};
use xuml_core::trace::{check_trace, parse_log, serialize_log, EventKind};
use xuml_testkit::gen::random_program;
use xuml_testkit::replay::replay;
use xuml_testkit::Fixture;

#[test]
fn three_commands_golden_trace() {
    let fx = Fixture::load("three_commands");
    let (snapshot, events) = fx.execute();
    let golden = std::fs::read_to_string(fx.path("trace.golden.jsonl")).unwrap();
    assert_eq!(serialize_log(&events), golden);
    let golden = std::fs::read_to_string(fx.path("snapshot.golden.json")).unwrap();
    assert_eq!(snapshot.to_json() + "\n", golden);
}

#[test]
fn corpus_traces_are_well_formed() {
    for fx in Fixture::all() {
        let (_, events) = fx.execute();
        assert_eq!(check_trace(&events), vec![], "{}", fx.name);
        let text = serialize_log(&events);
        assert_eq!(parse_log(&text).unwrap(), events, "{}", fx.name);
    }
}

#[test]
fn replaying_state_changes_rebuilds_the_snapshot() {
    for fx in Fixture::all() {
        let (snapshot, events) = fx.execute();
        let model = &fx.fused().model;
        let rebuilt = replay(model, &events).snapshot(snapshot.status, snapshot.return_value.clone());
        assert_eq!(rebuilt.to_json(), snapshot.to_json(), "{}", fx.name);
    }
}

#[test]
fn random_program_traces_are_well_formed() {
    let started = Instant::now();
    let mut failed = 0;
    for seed in 0..1000 {
        let program = random_program(seed);
        let fused = program.fused();
        let (class, method) = &program.entry;
        let options = SessionOptions { step_budget: 5_000 };
        let (snapshot, events) = runtime::run(fused.clone(), class, method, program.args.clone(), options)
            .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert_eq!(check_trace(&events), vec![], "seed {seed}");
        let rebuilt = replay(&fused.model, &events).snapshot(snapshot.status, snapshot.return_value.clone());
        assert_eq!(rebuilt.to_json(), snapshot.to_json(), "seed {seed}");
        if snapshot.status == Status::Failed {
            failed += 1;
            assert!(matches!(events.last().map(|e| &e.kind), Some(EventKind::Error { .. })), "seed {seed}");
        }
    }
    // Both outcomes should be exercised.
    assert!(failed > 50 && failed < 950, "{failed} of 1000 failed");
    assert!(started.elapsed().as_secs() < 60, "took {:?}", started.elapsed());
}

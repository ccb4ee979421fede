use proptest::prelude::*;
use xuml_core::oal::SourceSpan;
use xuml_core::trace::{parse_event, serialize_event, EventKind, TraceEvent};
use xuml_core::value::{InstanceId, Value};

fn value() -> impl Strategy<Value = Value> {
    prop_oneof![
        any::<i64>().prop_map(Value::Integer),
        any::<f64>().prop_filter("finite", |r| r.is_finite()).prop_map(Value::Real),
        any::<bool>().prop_map(Value::Boolean),
        any::<String>().prop_map(Value::String),
        proptest::option::of(1u64..1000).prop_map(|id| Value::Handle(id.map(InstanceId))),
        proptest::collection::vec(1u64..50, 0..6).prop_map(|ids| Value::set(ids.into_iter().map(InstanceId).collect())),
    ]
}

fn name() -> impl Strategy<Value = String> {
    "[A-Za-z_][A-Za-z0-9_]{0,8}"
}

fn event_kind() -> impl Strategy<Value = EventKind> {
    let id = (1u64..1000).prop_map(InstanceId);
    prop_oneof![
        Just(EventKind::RunStarted),
        (name(), name(), 1u32..500, 0u32..80, 0u32..80).prop_map(|(class, method, line, a, b)| EventKind::Command {
            class,
            method,
            span: SourceSpan::new(line, a.min(b), a.max(b)),
        }),
        (proptest::option::of(id.clone()), proptest::option::of(id.clone()), name(), name(), any::<bool>()).prop_map(
            |(caller_id, callee_id, class, method, is_static)| EventKind::MethodCall {
                caller_id,
                callee_id,
                class,
                method,
                is_static
            }
        ),
        proptest::option::of(value()).prop_map(|value| EventKind::MethodReturn { value }),
        (id.clone(), name()).prop_map(|(id, class)| EventKind::InstanceCreated { id, class }),
        (id.clone(), any::<bool>()).prop_map(|(id, cascaded)| EventKind::InstanceDeleted { id, cascaded }),
        (id.clone(), name(), value()).prop_map(|(id, attr, value)| EventKind::AttributeSet { id, attr, value }),
        ("R[0-9]{1,3}", id.clone(), id.clone(), any::<bool>()).prop_map(|(rel, a, b, multiplicity_warning)| {
            EventKind::LinkCreated { rel, a, b, multiplicity_warning }
        }),
        ("R[0-9]{1,3}", id.clone(), id).prop_map(|(rel, a, b)| EventKind::LinkRemoved { rel, a, b }),
        ("[a-z-]{1,20}", any::<String>(), proptest::option::of(1u32..500))
            .prop_map(|(kind, message, line)| EventKind::Error { kind, message, line }),
        prop_oneof![Just("finished"), Just("failed"), Just("stopped")]
            .prop_map(|s| EventKind::RunFinished { status: s.to_string() }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn events_survive_a_jsonl_round_trip(seq in 1u64..1_000_000, kind in event_kind()) {
        let event = TraceEvent { seq, kind };
        let line = serialize_event(&event);
        prop_assert!(!line.contains('\n'));
        prop_assert_eq!(parse_event(&line).unwrap(), event);
    }

    #[test]
    fn values_survive_a_json_round_trip(v in value()) {
        let json: serde_json::Value = serde_json::from_str(&v.to_json()).unwrap();
        prop_assert_eq!(Value::from_json(&json).unwrap(), v);
    }
}

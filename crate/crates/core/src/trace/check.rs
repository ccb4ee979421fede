use std::collections::BTreeSet;
use std::fmt;

use super::event::{EventKind, TraceEvent};
use crate::value::InstanceId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Sequence number of the offending event, if it is about one event.
    pub seq: Option<u64>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.seq {
            Some(seq) => write!(f, "seq {seq}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Checks a trace for well-formedness:
///
/// * `seq` starts at 1 and increments by 1;
/// * the first event is `run_started`, the last is `run_finished` or `error`,
///   and neither appears anywhere else;
/// * `method_call`/`method_return` nest properly (calls left open are only
///   allowed when the run ends in `error`);
/// * every instance id used by a later event was created before and not yet
///   deleted;
/// * every state change is preceded by some `command`, except the run
///   prologue: the entry receiver's `instance_created` and the entry
///   `method_call`, which come straight after `run_started`.
pub fn check_trace(log: &[TraceEvent]) -> Vec<Violation> {
    let mut out = Vec::new();
    let Some(first) = log.first() else {
        out.push(Violation { seq: None, message: "empty trace".into() });
        return out;
    };
    if first.kind != EventKind::RunStarted {
        out.push(Violation { seq: Some(first.seq), message: "trace must start with run_started".into() });
    }
    let last = log.last().expect("non-empty");
    let terminated = matches!(last.kind, EventKind::RunFinished { .. } | EventKind::Error { .. });
    if !terminated {
        out.push(Violation { seq: Some(last.seq), message: "trace must end with run_finished or error".into() });
    }
    let ends_in_error = matches!(last.kind, EventKind::Error { .. });

    let mut ids = Liveness::default();
    let mut call_depth = 0usize;
    let mut seen_command = false;
    // Still in the prologue: run_started [instance_created] [method_call].
    let mut prologue = true;

    for (idx, event) in log.iter().enumerate() {
        let seq = event.seq;
        let mut violation = |message: String| out.push(Violation { seq: Some(seq), message });
        if seq != idx as u64 + 1 {
            violation(format!("expected seq {}", idx + 1));
        }
        let is_first = idx == 0;
        let is_last = idx + 1 == log.len();
        match &event.kind {
            EventKind::RunStarted if !is_first => violation("run_started in mid-trace".into()),
            EventKind::RunFinished { .. } | EventKind::Error { .. } if !is_last => {
                violation(format!("{} before end of trace", event.kind.type_name()))
            }
            _ => {}
        }

        let in_prologue = prologue && !is_first && !seen_command;
        match &event.kind {
            EventKind::Command { .. } => {
                seen_command = true;
                prologue = false;
            }
            EventKind::MethodCall { caller_id, callee_id, .. } => {
                for id in [caller_id, callee_id].into_iter().flatten() {
                    ids.require(*id, &mut violation);
                }
                call_depth += 1;
                if !seen_command && !in_prologue {
                    violation("method_call before any command".into());
                }
                // Only one entry call belongs to the prologue.
                prologue = false;
            }
            EventKind::MethodReturn { .. } => {
                if call_depth == 0 {
                    violation("unbalanced return".into());
                } else {
                    call_depth -= 1;
                }
            }
            EventKind::InstanceCreated { id, .. } => {
                if !ids.create(*id) {
                    violation(format!("instance {} created twice", id.0));
                }
                if !seen_command && !in_prologue {
                    violation("state change before any command".into());
                }
            }
            EventKind::InstanceDeleted { id, .. } => {
                ids.require(*id, &mut violation);
                ids.delete(*id);
            }
            EventKind::AttributeSet { id, .. } => ids.require(*id, &mut violation),
            EventKind::LinkCreated { a, b, .. } | EventKind::LinkRemoved { a, b, .. } => {
                ids.require(*a, &mut violation);
                ids.require(*b, &mut violation);
            }
            _ => {}
        }
        if event.kind.is_state_change() && !matches!(event.kind, EventKind::InstanceCreated { .. }) && !seen_command {
            violation("state change before any command".into());
        }
    }
    if call_depth > 0 && terminated && !ends_in_error {
        out.push(Violation { seq: Some(last.seq), message: format!("{call_depth} method call(s) never returned") });
    }
    out
}

#[derive(Default)]
struct Liveness {
    live: BTreeSet<InstanceId>,
    dead: BTreeSet<InstanceId>,
}

impl Liveness {
    fn create(&mut self, id: InstanceId) -> bool {
        !self.dead.contains(&id) && self.live.insert(id)
    }

    fn delete(&mut self, id: InstanceId) {
        if self.live.remove(&id) {
            self.dead.insert(id);
        }
    }

    fn require(&self, id: InstanceId, violation: &mut impl FnMut(String)) {
        if self.live.contains(&id) {
            return;
        }
        if self.dead.contains(&id) {
            violation(format!("instance {} used after deletion", id.0));
        } else {
            violation(format!("unknown instance {}", id.0));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oal::SourceSpan;
    use crate::value::Value;

    fn log(kinds: Vec<EventKind>) -> Vec<TraceEvent> {
        kinds.into_iter().enumerate().map(|(i, kind)| TraceEvent { seq: i as u64 + 1, kind }).collect()
    }

    fn command() -> EventKind {
        EventKind::Command { class: "A".into(), method: "m".into(), span: SourceSpan::new(1, 0, 1) }
    }

    fn finished() -> EventKind {
        EventKind::RunFinished { status: "finished".into() }
    }

    fn call(callee: Option<u64>) -> EventKind {
        EventKind::MethodCall {
            caller_id: None,
            callee_id: callee.map(InstanceId),
            class: "A".into(),
            method: "m".into(),
            is_static: callee.is_none(),
        }
    }

    #[test]
    fn minimal_trace_is_valid() {
        assert!(check_trace(&log(vec![EventKind::RunStarted, command(), finished()])).is_empty());
    }

    #[test]
    fn unbalanced_return() {
        let v = check_trace(&log(vec![
            EventKind::RunStarted,
            command(),
            EventKind::MethodReturn { value: None },
            finished(),
        ]));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].message, "unbalanced return");
    }

    #[test]
    fn unknown_instance() {
        let v = check_trace(&log(vec![
            EventKind::RunStarted,
            command(),
            EventKind::AttributeSet { id: InstanceId(7), attr: "x".into(), value: Value::Integer(1) },
            finished(),
        ]));
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].message, "unknown instance 7");
    }

    #[test]
    fn prologue_allows_entry_instance_and_call() {
        let v = check_trace(&log(vec![
            EventKind::RunStarted,
            EventKind::InstanceCreated { id: InstanceId(1), class: "A".into() },
            call(Some(1)),
            command(),
            EventKind::MethodReturn { value: None },
            finished(),
        ]));
        assert!(v.is_empty(), "{v:?}");
    }

    #[test]
    fn state_change_outside_prologue_needs_command() {
        let v = check_trace(&log(vec![
            EventKind::RunStarted,
            call(None),
            EventKind::InstanceCreated { id: InstanceId(1), class: "A".into() },
            command(),
            EventKind::MethodReturn { value: None },
            finished(),
        ]));
        assert_eq!(v.len(), 1, "{v:?}");
    }

    #[test]
    fn seq_gaps_and_framing() {
        let mut events = log(vec![EventKind::RunStarted, command(), finished()]);
        events[2].seq = 5;
        assert_eq!(check_trace(&events).len(), 1);
        let v = check_trace(&log(vec![command(), EventKind::RunStarted]));
        assert_eq!(v.len(), 3, "{v:?}");
    }

    #[test]
    fn open_calls_only_allowed_on_error() {
        let ok = check_trace(&log(vec![
            EventKind::RunStarted,
            call(None),
            command(),
            EventKind::Error { kind: "division-by-zero".into(), message: "x".into(), line: Some(1) },
        ]));
        assert!(ok.is_empty(), "{ok:?}");
        let bad = check_trace(&log(vec![EventKind::RunStarted, call(None), command(), finished()]));
        assert_eq!(bad.len(), 1);
    }

    #[test]
    fn use_after_delete() {
        let v = check_trace(&log(vec![
            EventKind::RunStarted,
            command(),
            EventKind::InstanceCreated { id: InstanceId(1), class: "A".into() },
            EventKind::InstanceDeleted { id: InstanceId(1), cascaded: false },
            EventKind::AttributeSet { id: InstanceId(1), attr: "x".into(), value: Value::Integer(1) },
            finished(),
        ]));
        assert_eq!(v[0].message, "instance 1 used after deletion");
    }
}

//! The animation event vocabulary, its JSONL encoding and a well-formedness
//! checker.

mod check;
mod event;

pub use check::{check_trace, Violation};
pub use event::{parse_event, parse_log, serialize_event, serialize_log, EventKind, TraceEvent};

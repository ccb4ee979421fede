use serde_json::{Map, Value as Json};

use crate::json;
use crate::oal::SourceSpan;
use crate::value::{InstanceId, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEvent {
    pub seq: u64,
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    RunStarted,
    Command {
        class: String,
        method: String,
        span: SourceSpan,
    },
    MethodCall {
        caller_id: Option<InstanceId>,
        callee_id: Option<InstanceId>,
        /// Class that defines the invoked method.
        class: String,
        method: String,
        is_static: bool,
    },
    /// `None` when the method returned without a value.
    MethodReturn {
        value: Option<Value>,
    },
    InstanceCreated {
        id: InstanceId,
        class: String,
    },
    InstanceDeleted {
        id: InstanceId,
        cascaded: bool,
    },
    AttributeSet {
        id: InstanceId,
        attr: String,
        value: Value,
    },
    LinkCreated {
        rel: String,
        a: InstanceId,
        b: InstanceId,
        multiplicity_warning: bool,
    },
    LinkRemoved {
        rel: String,
        a: InstanceId,
        b: InstanceId,
    },
    Error {
        kind: String,
        message: String,
        line: Option<u32>,
    },
    RunFinished {
        status: String,
    },
}

impl EventKind {
    pub fn type_name(&self) -> &'static str {
        match self {
            EventKind::RunStarted => "run_started",
            EventKind::Command { .. } => "command",
            EventKind::MethodCall { .. } => "method_call",
            EventKind::MethodReturn { .. } => "method_return",
            EventKind::InstanceCreated { .. } => "instance_created",
            EventKind::InstanceDeleted { .. } => "instance_deleted",
            EventKind::AttributeSet { .. } => "attribute_set",
            EventKind::LinkCreated { .. } => "link_created",
            EventKind::LinkRemoved { .. } => "link_removed",
            EventKind::Error { .. } => "error",
            EventKind::RunFinished { .. } => "run_finished",
        }
    }

    /// True for events that change the heap or the link store.
    pub fn is_state_change(&self) -> bool {
        matches!(
            self,
            EventKind::InstanceCreated { .. }
                | EventKind::InstanceDeleted { .. }
                | EventKind::AttributeSet { .. }
                | EventKind::LinkCreated { .. }
                | EventKind::LinkRemoved { .. }
        )
    }
}

/// Builds one JSON object with keys in the given order.
struct ObjectWriter {
    out: String,
    first: bool,
}

impl ObjectWriter {
    fn new() -> Self {
        ObjectWriter { out: String::from("{"), first: true }
    }

    fn key(&mut self, key: &str) -> &mut String {
        if !self.first {
            self.out.push(',');
        }
        self.first = false;
        self.out.push('"');
        self.out.push_str(key);
        self.out.push_str("\":");
        &mut self.out
    }

    fn raw(&mut self, key: &str, raw: &str) {
        self.key(key).push_str(raw);
    }

    fn str(&mut self, key: &str, s: &str) {
        let quoted = json::string(s);
        self.key(key).push_str(&quoted);
    }

    fn id(&mut self, key: &str, id: Option<InstanceId>) {
        match id {
            Some(id) => self.raw(key, &id.0.to_string()),
            None => self.raw(key, "null"),
        }
    }

    fn value(&mut self, key: &str, value: Option<&Value>) {
        match value {
            Some(v) => v.write_json(self.key(key)),
            None => self.raw(key, "null"),
        }
    }

    fn finish(mut self) -> String {
        self.out.push('}');
        self.out
    }
}

/// One JSONL line (without the newline): `seq`, `type`, then the payload
/// keys in alphabetical order.
pub fn serialize_event(event: &TraceEvent) -> String {
    let mut w = ObjectWriter::new();
    w.raw("seq", &event.seq.to_string());
    w.str("type", event.kind.type_name());
    match &event.kind {
        EventKind::RunStarted => {}
        EventKind::Command { class, method, span } => {
            w.str("class", class);
            w.raw("col_end", &span.col_end.to_string());
            w.raw("col_start", &span.col_start.to_string());
            w.raw("line", &span.line.to_string());
            w.str("method", method);
        }
        EventKind::MethodCall { caller_id, callee_id, class, method, is_static } => {
            w.id("callee_id", *callee_id);
            w.id("caller_id", *caller_id);
            w.str("class", class);
            w.str("method", method);
            w.raw("static", &is_static.to_string());
        }
        EventKind::MethodReturn { value } => w.value("value", value.as_ref()),
        EventKind::InstanceCreated { id, class } => {
            w.str("class", class);
            w.id("id", Some(*id));
        }
        EventKind::InstanceDeleted { id, cascaded } => {
            w.raw("cascaded", &cascaded.to_string());
            w.id("id", Some(*id));
        }
        EventKind::AttributeSet { id, attr, value } => {
            w.str("attr", attr);
            w.id("id", Some(*id));
            w.value("value", Some(value));
        }
        EventKind::LinkCreated { rel, a, b, multiplicity_warning } => {
            w.id("a", Some(*a));
            w.id("b", Some(*b));
            w.raw("multiplicity_warning", &multiplicity_warning.to_string());
            w.str("rel", rel);
        }
        EventKind::LinkRemoved { rel, a, b } => {
            w.id("a", Some(*a));
            w.id("b", Some(*b));
            w.str("rel", rel);
        }
        EventKind::Error { kind, message, line } => {
            w.str("kind", kind);
            match line {
                Some(l) => w.raw("line", &l.to_string()),
                None => w.raw("line", "null"),
            }
            w.str("message", message);
        }
        EventKind::RunFinished { status } => w.str("status", status),
    }
    w.finish()
}

/// Serializes a whole log as JSONL: one event per line, each line
/// newline-terminated, no trailing blank line.
pub fn serialize_log(events: &[TraceEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serialize_event(e));
        out.push('\n');
    }
    out
}

fn field<'a>(obj: &'a Map<String, Json>, key: &str) -> Result<&'a Json, String> {
    obj.get(key).ok_or_else(|| format!("missing `{key}`"))
}

fn str_field(obj: &Map<String, Json>, key: &str) -> Result<String, String> {
    field(obj, key)?.as_str().map(str::to_string).ok_or_else(|| format!("`{key}` must be a string"))
}

fn u32_field(obj: &Map<String, Json>, key: &str) -> Result<u32, String> {
    field(obj, key)?
        .as_u64()
        .and_then(|v| u32::try_from(v).ok())
        .ok_or_else(|| format!("`{key}` must be a small unsigned integer"))
}

fn bool_field(obj: &Map<String, Json>, key: &str) -> Result<bool, String> {
    field(obj, key)?.as_bool().ok_or_else(|| format!("`{key}` must be a boolean"))
}

fn id_field(obj: &Map<String, Json>, key: &str) -> Result<Option<InstanceId>, String> {
    match field(obj, key)? {
        Json::Null => Ok(None),
        v => v.as_u64().map(|n| Some(InstanceId(n))).ok_or_else(|| format!("`{key}` must be an id")),
    }
}

fn required_id(obj: &Map<String, Json>, key: &str) -> Result<InstanceId, String> {
    id_field(obj, key)?.ok_or_else(|| format!("`{key}` must not be null"))
}

/// Parses one serialized event.
pub fn parse_event(line: &str) -> Result<TraceEvent, String> {
    let json: Json = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let obj = json.as_object().ok_or("event must be a JSON object")?;
    let seq = field(obj, "seq")?.as_u64().ok_or("`seq` must be an unsigned integer")?;
    let ty = str_field(obj, "type")?;
    let kind = match ty.as_str() {
        "run_started" => EventKind::RunStarted,
        "command" => EventKind::Command {
            class: str_field(obj, "class")?,
            method: str_field(obj, "method")?,
            span: SourceSpan::new(u32_field(obj, "line")?, u32_field(obj, "col_start")?, u32_field(obj, "col_end")?),
        },
        "method_call" => EventKind::MethodCall {
            caller_id: id_field(obj, "caller_id")?,
            callee_id: id_field(obj, "callee_id")?,
            class: str_field(obj, "class")?,
            method: str_field(obj, "method")?,
            is_static: bool_field(obj, "static")?,
        },
        "method_return" => EventKind::MethodReturn {
            value: match field(obj, "value")? {
                Json::Null => None,
                v => Some(Value::from_json(v)?),
            },
        },
        "instance_created" => {
            EventKind::InstanceCreated { id: required_id(obj, "id")?, class: str_field(obj, "class")? }
        }
        "instance_deleted" => {
            EventKind::InstanceDeleted { id: required_id(obj, "id")?, cascaded: bool_field(obj, "cascaded")? }
        }
        "attribute_set" => EventKind::AttributeSet {
            id: required_id(obj, "id")?,
            attr: str_field(obj, "attr")?,
            value: Value::from_json(field(obj, "value")?)?,
        },
        "link_created" => EventKind::LinkCreated {
            rel: str_field(obj, "rel")?,
            a: required_id(obj, "a")?,
            b: required_id(obj, "b")?,
            multiplicity_warning: bool_field(obj, "multiplicity_warning")?,
        },
        "link_removed" => {
            EventKind::LinkRemoved { rel: str_field(obj, "rel")?, a: required_id(obj, "a")?, b: required_id(obj, "b")? }
        }
        "error" => EventKind::Error {
            kind: str_field(obj, "kind")?,
            message: str_field(obj, "message")?,
            line: match field(obj, "line")? {
                Json::Null => None,
                _ => Some(u32_field(obj, "line")?),
            },
        },
        "run_finished" => EventKind::RunFinished { status: str_field(obj, "status")? },
        other => return Err(format!("unknown event type `{other}`")),
    };
    Ok(TraceEvent { seq, kind })
}

/// Parses a JSONL trace; blank lines are not allowed except at the very end.
pub fn parse_log(text: &str) -> Result<Vec<TraceEvent>, String> {
    text.lines().enumerate().map(|(i, line)| parse_event(line).map_err(|e| format!("line {}: {e}", i + 1))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(seq: u64, kind: EventKind) -> TraceEvent {
        TraceEvent { seq, kind }
    }

    #[test]
    fn key_order() {
        let e = ev(2, EventKind::InstanceCreated { id: InstanceId(1), class: "Ranger".into() });
        assert_eq!(serialize_event(&e), r#"{"seq":2,"type":"instance_created","class":"Ranger","id":1}"#);
    }

    #[test]
    fn string_values_are_escaped() {
        let e =
            ev(5, EventKind::AttributeSet { id: InstanceId(1), attr: "s".into(), value: Value::String("a\"b".into()) });
        assert_eq!(
            serialize_event(&e),
            r#"{"seq":5,"type":"attribute_set","attr":"s","id":1,"value":{"t":"str","v":"a\"b"}}"#
        );
    }

    #[test]
    fn void_return_is_null() {
        let e = ev(9, EventKind::MethodReturn { value: None });
        assert_eq!(serialize_event(&e), r#"{"seq":9,"type":"method_return","value":null}"#);
        let e = ev(9, EventKind::MethodReturn { value: Some(Value::NONE) });
        assert_eq!(serialize_event(&e), r#"{"seq":9,"type":"method_return","value":{"t":"handle","v":null}}"#);
    }

    #[test]
    fn command_and_call_layout() {
        let e = ev(3, EventKind::Command { class: "A".into(), method: "m".into(), span: SourceSpan::new(4, 2, 9) });
        assert_eq!(
            serialize_event(&e),
            r#"{"seq":3,"type":"command","class":"A","col_end":9,"col_start":2,"line":4,"method":"m"}"#
        );
        let e = ev(
            4,
            EventKind::MethodCall {
                caller_id: None,
                callee_id: Some(InstanceId(2)),
                class: "B".into(),
                method: "n".into(),
                is_static: false,
            },
        );
        assert_eq!(
            serialize_event(&e),
            r#"{"seq":4,"type":"method_call","callee_id":2,"caller_id":null,"class":"B","method":"n","static":false}"#
        );
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_event("{}").is_err());
        assert!(parse_event(r#"{"seq":1,"type":"nope"}"#).is_err());
        assert!(parse_event(r#"{"seq":1,"type":"instance_created","class":"A","id":null}"#).is_err());
    }
}

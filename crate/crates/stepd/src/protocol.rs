//! Wire format: one JSON object per line or WebSocket text frame.
//!
//! Requests look like `{"id":1,"cmd":"start","entry":"Park.CreateRanger","args":[...]}`.
//! Every request gets exactly one reply, `{"id":1,"ok":true,"data":...}` or
//! `{"id":1,"ok":false,"error":{"kind":...,"message":...}}`. Trace events
//! produced by a request are pushed as `{"event":{...}}` before its reply.

use serde_json::{Map, Value as Json};
use xuml_core::model::is_identifier;
use xuml_core::trace::{serialize_event, TraceEvent};
use xuml_core::value::Value;

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Start { class: String, method: String, args: Vec<Value> },
    Step,
    Continue,
    Pause,
    State,
    Model,
    Source,
    Stop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    pub id: Json,
    pub command: Command,
}

/// A request that could not be understood, with whatever id it carried.
#[derive(Debug, Clone, PartialEq)]
pub struct Malformed {
    pub id: Json,
    pub message: String,
}

pub const MALFORMED: &str = "malformed-command";

pub fn parse_request(line: &str) -> Result<Request, Malformed> {
    let json: Json =
        serde_json::from_str(line).map_err(|e| Malformed { id: Json::Null, message: format!("not JSON: {e}") })?;
    let Json::Object(obj) = json else {
        return Err(Malformed { id: Json::Null, message: "a request must be a JSON object".into() });
    };
    let id = obj.get("id").cloned().unwrap_or(Json::Null);
    let fail = |message: String| Malformed { id: id.clone(), message };
    if id.is_null() {
        return Err(fail("missing `id`".into()));
    }
    let cmd = obj.get("cmd").and_then(Json::as_str).ok_or_else(|| fail("missing `cmd` string".into()))?;
    let command = match cmd {
        "start" => start(&obj).map_err(fail)?,
        "step" => Command::Step,
        "continue" => Command::Continue,
        "pause" => Command::Pause,
        "state" => Command::State,
        "model" => Command::Model,
        "source" => Command::Source,
        "stop" => Command::Stop,
        other => return Err(fail(format!("unknown cmd `{other}`"))),
    };
    Ok(Request { id, command })
}

/// Accepts `entry`/`args` at the top level or inside an `args` object.
fn start(obj: &Map<String, Json>) -> Result<Command, String> {
    let payload = match obj.get("args") {
        Some(Json::Object(inner)) if !obj.contains_key("entry") => inner,
        _ => obj,
    };
    let entry = payload.get("entry").and_then(Json::as_str).ok_or("start needs an `entry` string")?;
    let (class, method) = entry
        .split_once('.')
        .filter(|(c, m)| is_identifier(c) && is_identifier(m))
        .ok_or_else(|| format!("entry `{entry}` is not Class.Method"))?;
    let args = match payload.get("args") {
        None | Some(Json::Null) => Vec::new(),
        Some(Json::Array(items)) => items.iter().map(Value::from_json).collect::<Result<_, _>>()?,
        Some(_) => return Err("`args` must be a list of tagged values".into()),
    };
    Ok(Command::Start { class: class.into(), method: method.into(), args })
}

fn id_json(id: &Json) -> String {
    serde_json::to_string(id).expect("json value serializes")
}

/// `data` must already be serialized JSON.
pub fn ok_reply(id: &Json, data: &str) -> String {
    format!("{{\"id\":{},\"ok\":true,\"data\":{data}}}", id_json(id))
}

pub fn error_reply(id: &Json, kind: &str, message: &str) -> String {
    let error = serde_json::json!({ "kind": kind, "message": message });
    format!("{{\"id\":{},\"ok\":false,\"error\":{error}}}", id_json(id))
}

pub fn event_frame(event: &TraceEvent) -> String {
    format!("{{\"event\":{}}}", serialize_event(event))
}

/// The trace line inside an event frame, byte for byte.
pub fn event_payload(frame: &str) -> Option<&str> {
    frame.strip_prefix("{\"event\":")?.strip_suffix('}')
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn start_forms() {
        let top = parse_request(r#"{"id":1,"cmd":"start","entry":"Main.Start"}"#).unwrap();
        assert_eq!(top.command, Command::Start { class: "Main".into(), method: "Start".into(), args: vec![] });
        let nested =
            parse_request(r#"{"id":2,"cmd":"start","args":{"entry":"P.C","args":[{"t":"int","v":3}]}}"#).unwrap();
        assert_eq!(
            nested.command,
            Command::Start { class: "P".into(), method: "C".into(), args: vec![Value::Integer(3)] }
        );
    }

    #[test]
    fn malformed_requests() {
        assert_eq!(parse_request(r#"{"cmd":}"#).unwrap_err().id, Json::Null);
        assert_eq!(parse_request(r#"{"id":4,"cmd":"jump"}"#).unwrap_err().id, json!(4));
        assert!(parse_request(r#"{"id":5,"cmd":"start","entry":"NoDot"}"#).is_err());
        assert!(parse_request(r#"{"id":6,"cmd":"start","entry":"A.b","args":[7]}"#).is_err());
        assert!(parse_request(r#"{"cmd":"step"}"#).is_err());
        assert!(parse_request("[1]").is_err());
    }

    #[test]
    fn frames() {
        assert_eq!(ok_reply(&json!(1), "null"), r#"{"id":1,"ok":true,"data":null}"#);
        assert_eq!(
            error_reply(&json!("a"), "no-session", "x"),
            r#"{"id":"a","ok":false,"error":{"kind":"no-session","message":"x"}}"#
        );
        let event = TraceEvent { seq: 1, kind: xuml_core::trace::EventKind::RunStarted };
        let frame = event_frame(&event);
        assert_eq!(frame, r#"{"event":{"seq":1,"type":"run_started"}}"#);
        assert_eq!(event_payload(&frame), Some(r#"{"seq":1,"type":"run_started"}"#));
    }
}

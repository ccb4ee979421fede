//! Runtime values and their tagged JSON form.

use std::fmt;

use serde_json::Value as Json;

use crate::json;
use crate::model::DefaultValue;

/// Identity of an object instance. Assigned from 1 in creation order and
/// never reused within a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InstanceId(pub u64);

impl fmt::Display for InstanceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Integer(i64),
    Real(f64),
    Boolean(bool),
    String(String),
    Handle(Option<InstanceId>),
    /// Sorted ascending, no duplicates.
    Set(Vec<InstanceId>),
}

impl Value {
    pub const NONE: Value = Value::Handle(None);

    pub fn set(mut ids: Vec<InstanceId>) -> Value {
        ids.sort_unstable();
        ids.dedup();
        Value::Set(ids)
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Integer(_) => "Integer",
            Value::Real(_) => "Real",
            Value::Boolean(_) => "Boolean",
            Value::String(_) => "String",
            Value::Handle(_) => "Handle",
            Value::Set(_) => "InstanceSet",
        }
    }

    /// Appends the tagged JSON form, e.g. `{"t":"int","v":3}`.
    pub fn write_json(&self, out: &mut String) {
        let (tag, body) = match self {
            Value::Integer(v) => ("int", v.to_string()),
            Value::Real(v) => ("real", json::real(*v)),
            Value::Boolean(v) => ("bool", v.to_string()),
            Value::String(s) => ("str", json::string(s)),
            Value::Handle(None) => ("handle", "null".to_string()),
            Value::Handle(Some(id)) => ("handle", id.0.to_string()),
            Value::Set(ids) => {
                let items: Vec<String> = ids.iter().map(|id| id.0.to_string()).collect();
                ("set", format!("[{}]", items.join(",")))
            }
        };
        out.push_str("{\"t\":\"");
        out.push_str(tag);
        out.push_str("\",\"v\":");
        out.push_str(&body);
        out.push('}');
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        self.write_json(&mut out);
        out
    }

    /// Reads the tagged JSON form back.
    pub fn from_json(v: &Json) -> Result<Value, String> {
        let obj = v.as_object().ok_or("tagged value must be an object")?;
        let tag = obj.get("t").and_then(Json::as_str).ok_or("tagged value needs a string `t`")?;
        let body = obj.get("v").ok_or("tagged value needs `v`")?;
        let bad = || format!("bad `{tag}` value {body}");
        Ok(match tag {
            "int" => Value::Integer(body.as_i64().ok_or_else(bad)?),
            "real" => Value::Real(body.as_f64().ok_or_else(bad)?),
            "bool" => Value::Boolean(body.as_bool().ok_or_else(bad)?),
            "str" => Value::String(body.as_str().ok_or_else(bad)?.to_string()),
            "handle" => match body {
                Json::Null => Value::Handle(None),
                other => Value::Handle(Some(InstanceId(other.as_u64().ok_or_else(bad)?))),
            },
            "set" => {
                let items = body.as_array().ok_or_else(bad)?;
                let ids =
                    items.iter().map(|i| i.as_u64().map(InstanceId).ok_or_else(bad)).collect::<Result<Vec<_>, _>>()?;
                Value::set(ids)
            }
            other => return Err(format!("unknown value tag `{other}`")),
        })
    }
}

impl From<DefaultValue> for Value {
    fn from(d: DefaultValue) -> Self {
        match d {
            DefaultValue::Integer(v) => Value::Integer(v),
            DefaultValue::Real(v) => Value::Real(v),
            DefaultValue::Boolean(v) => Value::Boolean(v),
            DefaultValue::String(s) => Value::String(s),
            DefaultValue::NoHandle => Value::Handle(None),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Integer(v) => write!(f, "{v}"),
            Value::Real(v) => f.write_str(&json::real(*v)),
            Value::Boolean(v) => write!(f, "{v}"),
            Value::String(s) => write!(f, "{s:?}"),
            Value::Handle(None) => f.write_str("none"),
            Value::Handle(Some(id)) => write!(f, "{id}"),
            Value::Set(ids) => {
                let items: Vec<String> = ids.iter().map(ToString::to_string).collect();
                write!(f, "{{{}}}", items.join(", "))
            }
        }
    }
}

/// Parses a JSON list of tagged values, as accepted for entry arguments.
pub fn parse_value_list(text: &str) -> Result<Vec<Value>, String> {
    let json: Json = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let items = json.as_array().ok_or("arguments must be a JSON list")?;
    items.iter().map(Value::from_json).collect()
}

use super::heap::{Link, ObjectInstance};
use super::Status;
use crate::json;
use crate::value::Value;

/// Canonical copy of the runtime state: instances by id, attributes by name,
/// links by (relation, a, b).
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub instances: Vec<ObjectInstance>,
    pub links: Vec<Link>,
    pub status: Status,
    pub return_value: Option<Value>,
}

impl Snapshot {
    /// Single-line JSON, e.g.
    /// `{"instances":[],"links":[],"status":"finished","return_value":null}`.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\"instances\":[");
        for (i, obj) in self.instances.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("{{\"id\":{},\"class\":{},\"attrs\":{{", obj.id.0, json::string(&obj.class)));
            for (j, (name, value)) in obj.attrs.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&json::string(name));
                out.push(':');
                value.write_json(&mut out);
            }
            out.push_str("}}");
        }
        out.push_str("],\"links\":[");
        for (i, link) in self.links.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("{{\"rel\":{},\"a\":{},\"b\":{}}}", json::string(&link.rel), link.a.0, link.b.0));
        }
        out.push_str("],\"status\":");
        out.push_str(&json::string(self.status.as_str()));
        out.push_str(",\"return_value\":");
        match &self.return_value {
            Some(v) => v.write_json(&mut out),
            None => out.push_str("null"),
        }
        out.push('}');
        out
    }
}

//! Rebuilds heap state from a trace alone: an independent oracle for the
//! interpreter's snapshots.

use std::collections::BTreeMap;

use xuml_core::model::{default_attribute_value, ClassModel};
use xuml_core::runtime::{Link, ObjectInstance, Snapshot, Status};
use xuml_core::trace::{EventKind, TraceEvent};
use xuml_core::value::{InstanceId, Value};

#[derive(Debug, Clone, Default)]
pub struct Replay {
    instances: BTreeMap<InstanceId, ObjectInstance>,
    links: Vec<Link>,
}

impl Replay {
    pub fn apply(&mut self, model: &ClassModel, event: &TraceEvent) {
        match &event.kind {
            EventKind::InstanceCreated { id, class } => {
                let attrs = model
                    .all_attributes(class)
                    .into_iter()
                    .map(|a| (a.name.clone(), Value::from(default_attribute_value(&a.ty))))
                    .collect();
                self.instances.insert(*id, ObjectInstance { id: *id, class: class.clone(), attrs });
            }
            EventKind::InstanceDeleted { id, .. } => {
                self.instances.remove(id);
            }
            EventKind::AttributeSet { id, attr, value } => {
                if let Some(obj) = self.instances.get_mut(id) {
                    obj.attrs.insert(attr.clone(), value.clone());
                }
            }
            EventKind::LinkCreated { rel, a, b, .. } => {
                let link = Link { rel: rel.clone(), a: *a, b: *b };
                if let Err(at) = self.links.binary_search(&link) {
                    self.links.insert(at, link);
                }
            }
            EventKind::LinkRemoved { rel, a, b } => {
                let link = Link { rel: rel.clone(), a: *a, b: *b };
                if let Ok(at) = self.links.binary_search(&link) {
                    self.links.remove(at);
                }
            }
            _ => {}
        }
    }

    pub fn snapshot(&self, status: Status, return_value: Option<Value>) -> Snapshot {
        Snapshot {
            instances: self.instances.values().cloned().collect(),
            links: self.links.clone(),
            status,
            return_value,
        }
    }
}

/// State after replaying every event of `events`.
pub fn replay(model: &ClassModel, events: &[TraceEvent]) -> Replay {
    let mut r = Replay::default();
    for e in events {
        r.apply(model, e);
    }
    r
}

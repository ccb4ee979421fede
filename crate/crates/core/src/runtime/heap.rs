use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::model::{default_attribute_value, ClassModel, RelationKind};
use crate::value::{InstanceId, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectInstance {
    pub id: InstanceId,
    pub class: String,
    pub attrs: BTreeMap<String, Value>,
}

/// A relation instance; `a` plays the relation's `from` end.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    pub rel: String,
    pub a: InstanceId,
    pub b: InstanceId,
}

/// How a handle failed to name a live instance.
pub(crate) enum Deref {
    None,
    Stale,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Heap {
    next_id: u64,
    live: BTreeMap<InstanceId, ObjectInstance>,
    /// Class of every deleted instance.
    dead: HashMap<InstanceId, String>,
    links: BTreeSet<Link>,
}

impl Heap {
    pub fn create(&mut self, model: &ClassModel, class: &str) -> InstanceId {
        self.next_id += 1;
        let id = InstanceId(self.next_id);
        let attrs = model
            .all_attributes(class)
            .into_iter()
            .map(|a| (a.name.clone(), Value::from(default_attribute_value(&a.ty))))
            .collect();
        self.live.insert(id, ObjectInstance { id, class: class.to_string(), attrs });
        id
    }

    pub fn get(&self, id: InstanceId) -> Option<&ObjectInstance> {
        self.live.get(&id)
    }

    pub fn get_mut(&mut self, id: InstanceId) -> Option<&mut ObjectInstance> {
        self.live.get_mut(&id)
    }

    pub fn is_live(&self, id: InstanceId) -> bool {
        self.live.contains_key(&id)
    }

    /// Class of a live or deleted instance.
    pub fn class_of(&self, id: InstanceId) -> Option<&str> {
        self.live.get(&id).map(|o| o.class.as_str()).or_else(|| self.dead.get(&id).map(String::as_str))
    }

    pub fn check(&self, handle: Option<InstanceId>) -> Result<InstanceId, Deref> {
        match handle {
            None => Err(Deref::None),
            Some(id) if self.is_live(id) => Ok(id),
            Some(_) => Err(Deref::Stale),
        }
    }

    /// Live instances of `class` or its subclasses, ascending by id.
    pub fn instances_of(&self, model: &ClassModel, class: &str) -> Vec<InstanceId> {
        self.live.values().filter(|o| model.is_a(&o.class, class)).map(|o| o.id).collect()
    }

    pub fn instances(&self) -> impl Iterator<Item = &ObjectInstance> {
        self.live.values()
    }

    pub fn links(&self) -> impl Iterator<Item = &Link> {
        self.links.iter()
    }

    pub fn has_link(&self, link: &Link) -> bool {
        self.links.contains(link)
    }

    pub fn insert_link(&mut self, link: Link) -> bool {
        self.links.insert(link)
    }

    pub fn remove_link(&mut self, link: &Link) -> bool {
        self.links.remove(link)
    }

    fn rel_links<'a>(&'a self, rel: &'a str) -> impl Iterator<Item = &'a Link> + 'a {
        let lo = Link { rel: rel.to_string(), a: InstanceId(0), b: InstanceId(0) };
        self.links.range(lo..).take_while(move |l| l.rel == rel)
    }

    /// Links of `rel` with `id` at the `from` end / at the `to` end.
    pub fn count_from(&self, rel: &str, id: InstanceId) -> usize {
        self.rel_links(rel).filter(|l| l.a == id).count()
    }

    pub fn count_to(&self, rel: &str, id: InstanceId) -> usize {
        self.rel_links(rel).filter(|l| l.b == id).count()
    }

    /// Instances linked to `id` across `rel`, at either end.
    pub fn partners(&self, rel: &str, id: InstanceId) -> Vec<InstanceId> {
        self.rel_links(rel)
            .filter_map(|l| {
                if l.a == id {
                    Some(l.b)
                } else if l.b == id {
                    Some(l.a)
                } else {
                    None
                }
            })
            .collect()
    }

    /// Deletes `root` and, through composition links where it is the whole,
    /// its parts. Returns, in order, the links removed and instances deleted
    /// (`true` marks cascaded deletions).
    pub fn delete(&mut self, model: &ClassModel, root: InstanceId) -> Vec<Removal> {
        let mut out = Vec::new();
        let mut pending = vec![(root, false)];
        while let Some((id, cascaded)) = pending.pop() {
            let Some(obj) = self.live.remove(&id) else { continue };
            let involved: Vec<Link> = self.links.iter().filter(|l| l.a == id || l.b == id).cloned().collect();
            let mut parts = Vec::new();
            for link in involved {
                self.links.remove(&link);
                let composite = model.relation(&link.rel).is_some_and(|r| r.kind == RelationKind::Composition);
                if composite && link.a == id && link.b != id {
                    parts.push(link.b);
                }
                out.push(Removal::Link(link));
            }
            self.dead.insert(id, obj.class);
            out.push(Removal::Instance { id, cascaded });
            pending.extend(parts.into_iter().rev().map(|p| (p, true)));
        }
        out
    }
}

pub(crate) enum Removal {
    Link(Link),
    Instance { id: InstanceId, cascaded: bool },
}

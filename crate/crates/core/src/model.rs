//! The static layer: classes, attributes, methods, relations and generalizations.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

/// Primitive or instance-handle attribute type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ValueType {
    Integer,
    Real,
    Boolean,
    String,
    Handle(String),
}

impl ValueType {
    /// Parses a type name as written in model files. Anything that is not a
    /// primitive name is taken to be a class name.
    pub fn from_name(name: &str) -> ValueType {
        match name {
            "Integer" => ValueType::Integer,
            "Real" => ValueType::Real,
            "Boolean" => ValueType::Boolean,
            "String" => ValueType::String,
            other => ValueType::Handle(other.to_string()),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            ValueType::Integer => "Integer",
            ValueType::Real => "Real",
            ValueType::Boolean => "Boolean",
            ValueType::String => "String",
            ValueType::Handle(class) => class,
        }
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const PRIMITIVE_TYPES: [&str; 4] = ["Integer", "Real", "Boolean", "String"];

/// Default value of a freshly instantiated attribute.
#[derive(Debug, Clone, PartialEq)]
pub enum DefaultValue {
    Integer(i64),
    Real(f64),
    Boolean(bool),
    String(String),
    NoHandle,
}

pub fn default_attribute_value(ty: &ValueType) -> DefaultValue {
    match ty {
        ValueType::Integer => DefaultValue::Integer(0),
        ValueType::Real => DefaultValue::Real(0.0),
        ValueType::Boolean => DefaultValue::Boolean(false),
        ValueType::String => DefaultValue::String(String::new()),
        ValueType::Handle(_) => DefaultValue::NoHandle,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeDef {
    pub name: String,
    pub ty: ValueType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamDef {
    pub name: String,
    pub ty: ValueType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDef {
    pub name: String,
    pub is_static: bool,
    pub params: Vec<ParamDef>,
    pub returns: Option<ValueType>,
}

impl MethodDef {
    pub fn new(name: impl Into<String>) -> Self {
        MethodDef { name: name.into(), is_static: false, params: Vec::new(), returns: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDef {
    pub name: String,
    pub attributes: Vec<AttributeDef>,
    pub methods: Vec<MethodDef>,
}

impl ClassDef {
    pub fn new(name: impl Into<String>) -> Self {
        ClassDef { name: name.into(), attributes: Vec::new(), methods: Vec::new() }
    }

    pub fn method(&self, name: &str) -> Option<&MethodDef> {
        self.methods.iter().find(|m| m.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    Association,
    Composition,
}

impl RelationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationKind::Association => "association",
            RelationKind::Composition => "composition",
        }
    }
}

pub const MULTIPLICITIES: [&str; 4] = ["1", "0..1", "0..*", "1..*"];

/// Upper bound of a multiplicity string, `None` meaning unbounded.
pub fn multiplicity_upper(mult: &str) -> Option<usize> {
    match mult {
        "1" | "0..1" => Some(1),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationDef {
    pub id: String,
    pub kind: RelationKind,
    pub from: String,
    pub to: String,
    pub from_mult: String,
    pub to_mult: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generalization {
    pub sub: String,
    pub sup: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ClassModel {
    pub classes: Vec<ClassDef>,
    pub relations: Vec<RelationDef>,
    pub generalizations: Vec<Generalization>,
}

/// One model invariant violation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModelDiagnostic {
    /// Class, relation or generalization the problem is attached to.
    pub subject: String,
    pub message: String,
}

impl ModelDiagnostic {
    fn new(subject: impl Into<String>, message: impl Into<String>) -> Self {
        ModelDiagnostic { subject: subject.into(), message: message.into() }
    }
}

impl fmt::Display for ModelDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn is_relation_id(id: &str) -> bool {
    id.len() > 1 && id.starts_with('R') && id[1..].bytes().all(|b| b.is_ascii_digit())
}

impl ClassModel {
    pub fn class(&self, name: &str) -> Option<&ClassDef> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn relation(&self, id: &str) -> Option<&RelationDef> {
        self.relations.iter().find(|r| r.id == id)
    }

    /// Direct superclass of `class`, if any.
    pub fn parent(&self, class: &str) -> Option<&str> {
        self.generalizations.iter().find(|g| g.sub == class).map(|g| g.sup.as_str())
    }

    /// `class` followed by its ancestors, nearest first. Stops early on a
    /// cycle so it is safe to call on an unvalidated model.
    pub fn lineage<'a>(&'a self, class: &'a str) -> Vec<&'a str> {
        let mut chain = vec![class];
        let mut current = class;
        while let Some(parent) = self.parent(current) {
            if chain.contains(&parent) || chain.len() > self.classes.len() {
                break;
            }
            chain.push(parent);
            current = parent;
        }
        chain
    }

    /// True when `class` is `ancestor` or inherits from it.
    pub fn is_a(&self, class: &str, ancestor: &str) -> bool {
        self.lineage(class).contains(&ancestor)
    }

    /// All attributes of `class`, ancestors' first.
    pub fn all_attributes(&self, class: &str) -> Vec<&AttributeDef> {
        let mut attrs = Vec::new();
        for name in self.lineage(class).into_iter().rev() {
            if let Some(def) = self.class(name) {
                attrs.extend(def.attributes.iter());
            }
        }
        attrs
    }

    pub fn attribute(&self, class: &str, attr: &str) -> Option<&AttributeDef> {
        self.lineage(class)
            .into_iter()
            .filter_map(|c| self.class(c))
            .find_map(|c| c.attributes.iter().find(|a| a.name == attr))
    }

    /// Finds the class defining `method`, walking from `class` up the
    /// generalization chain. Subclass definitions shadow inherited ones.
    pub fn resolve_method(&self, class: &str, method: &str) -> Option<(&str, &MethodDef)> {
        self.lineage(class)
            .into_iter()
            .find_map(|name| self.class(name).and_then(|def| def.method(method).map(|m| (def.name.as_str(), m))))
    }

    fn type_is_known(&self, ty: &ValueType) -> bool {
        match ty {
            ValueType::Handle(class) => self.class(class).is_some(),
            _ => true,
        }
    }

    /// Returns every invariant violation; empty means the model is valid.
    /// The result is sorted so that it does not depend on declaration order.
    pub fn validate(&self) -> Vec<ModelDiagnostic> {
        let mut out = BTreeSet::new();
        let mut seen = HashMap::new();
        for class in &self.classes {
            if !is_identifier(&class.name) {
                out.insert(ModelDiagnostic::new(&class.name, "invalid class name"));
            }
            if PRIMITIVE_TYPES.contains(&class.name.as_str()) {
                out.insert(ModelDiagnostic::new(&class.name, "class name shadows a primitive type"));
            }
            *seen.entry(class.name.as_str()).or_insert(0) += 1;
        }
        for (name, count) in &seen {
            if *count > 1 {
                out.insert(ModelDiagnostic::new(*name, format!("duplicate class {name}")));
            }
        }

        self.validate_generalizations(&mut out);

        for class in &self.classes {
            self.validate_members(class, &mut out);
        }

        let mut relation_ids = BTreeMap::new();
        for rel in &self.relations {
            if !is_relation_id(&rel.id) {
                out.insert(ModelDiagnostic::new(&rel.id, "invalid relation id"));
            }
            *relation_ids.entry(rel.id.as_str()).or_insert(0) += 1;
            for end in [&rel.from, &rel.to] {
                if self.class(end).is_none() {
                    out.insert(ModelDiagnostic::new(&rel.id, format!("unknown class {end}")));
                }
            }
            for mult in [&rel.from_mult, &rel.to_mult] {
                if !MULTIPLICITIES.contains(&mult.as_str()) {
                    out.insert(ModelDiagnostic::new(&rel.id, format!("invalid multiplicity {mult}")));
                }
            }
        }
        for (id, count) in relation_ids {
            if count > 1 {
                out.insert(ModelDiagnostic::new(id, format!("duplicate relation {id}")));
            }
        }
        out.into_iter().collect()
    }

    fn validate_generalizations(&self, out: &mut BTreeSet<ModelDiagnostic>) {
        let mut parents: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for g in &self.generalizations {
            for end in [&g.sub, &g.sup] {
                if self.class(end).is_none() {
                    out.insert(ModelDiagnostic::new(format!("{} -> {}", g.sub, g.sup), format!("unknown class {end}")));
                }
            }
            parents.entry(&g.sub).or_default().push(&g.sup);
        }
        for (sub, sups) in &parents {
            if sups.len() > 1 {
                out.insert(ModelDiagnostic::new(*sub, "multiple inheritance is not supported"));
            }
        }
        // Follow first parents; each cycle is reported once, keyed by its
        // smallest member.
        for start in parents.keys() {
            let mut path = vec![*start];
            let mut current = *start;
            while let Some(next) = parents.get(current).and_then(|p| p.first()) {
                if let Some(pos) = path.iter().position(|c| c == next) {
                    let key = path[pos..].iter().min().copied().unwrap_or(next);
                    out.insert(ModelDiagnostic::new(key, "generalization cycle"));
                    break;
                }
                path.push(next);
                current = next;
            }
        }
    }

    fn validate_members(&self, class: &ClassDef, out: &mut BTreeSet<ModelDiagnostic>) {
        let subject = class.name.as_str();
        let inherited: Vec<&str> = self
            .lineage(subject)
            .into_iter()
            .skip(1)
            .filter_map(|c| self.class(c))
            .flat_map(|c| c.attributes.iter().map(|a| a.name.as_str()))
            .collect();
        let mut own = BTreeSet::new();
        for attr in &class.attributes {
            if !is_identifier(&attr.name) {
                out.insert(ModelDiagnostic::new(subject, format!("invalid attribute name {}", attr.name)));
            }
            if !own.insert(attr.name.as_str()) || inherited.contains(&attr.name.as_str()) {
                out.insert(ModelDiagnostic::new(subject, format!("duplicate attribute {}", attr.name)));
            }
            if !self.type_is_known(&attr.ty) {
                out.insert(ModelDiagnostic::new(subject, format!("unknown type {}", attr.ty)));
            }
        }
        let mut methods = BTreeSet::new();
        for method in &class.methods {
            if !is_identifier(&method.name) {
                out.insert(ModelDiagnostic::new(subject, format!("invalid method name {}", method.name)));
            }
            if !methods.insert(method.name.as_str()) {
                out.insert(ModelDiagnostic::new(subject, format!("duplicate method {}", method.name)));
            }
            let mut params = BTreeSet::new();
            for p in &method.params {
                if p.name == "self" {
                    out.insert(ModelDiagnostic::new(
                        subject,
                        format!("parameter name self is reserved in {}", method.name),
                    ));
                } else if !is_identifier(&p.name) {
                    out.insert(ModelDiagnostic::new(subject, format!("invalid parameter name {}", p.name)));
                }
                if !params.insert(p.name.as_str()) {
                    out.insert(ModelDiagnostic::new(
                        subject,
                        format!("duplicate parameter {} in {}", p.name, method.name),
                    ));
                }
                if !self.type_is_known(&p.ty) {
                    out.insert(ModelDiagnostic::new(subject, format!("unknown type {}", p.ty)));
                }
            }
            if let Some(ret) = &method.returns {
                if !self.type_is_known(ret) {
                    out.insert(ModelDiagnostic::new(subject, format!("unknown type {ret}")));
                }
            }
        }
    }
}

/// Free-function form of [`ClassModel::validate`].
pub fn validate_model(model: &ClassModel) -> Vec<ModelDiagnostic> {
    model.validate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(name: &str) -> ClassDef {
        ClassDef::new(name)
    }

    fn person_ranger() -> ClassModel {
        let mut person = class("Person");
        person.methods.push(MethodDef::new("Notify"));
        ClassModel {
            classes: vec![person, class("Ranger")],
            relations: vec![],
            generalizations: vec![Generalization { sub: "Ranger".into(), sup: "Person".into() }],
        }
    }

    #[test]
    fn empty_model_is_valid() {
        assert!(validate_model(&ClassModel::default()).is_empty());
    }

    #[test]
    fn two_node_cycle_reported_once() {
        let m = ClassModel {
            classes: vec![class("A"), class("B")],
            relations: vec![],
            generalizations: vec![
                Generalization { sub: "A".into(), sup: "B".into() },
                Generalization { sub: "B".into(), sup: "A".into() },
            ],
        };
        let diags = validate_model(&m);
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert_eq!(diags[0].message, "generalization cycle");
    }

    #[test]
    fn relation_to_missing_class() {
        let m = ClassModel {
            classes: vec![class("Subject")],
            relations: vec![RelationDef {
                id: "R1".into(),
                kind: RelationKind::Association,
                from: "Subject".into(),
                to: "Watcher".into(),
                from_mult: "1".into(),
                to_mult: "0..*".into(),
            }],
            generalizations: vec![],
        };
        let diags = validate_model(&m);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].message, "unknown class Watcher");
    }

    #[test]
    fn attribute_type_must_exist() {
        let mut c = class("Fruit");
        c.attributes.push(AttributeDef { name: "kind".into(), ty: ValueType::from_name("Banana") });
        let m = ClassModel { classes: vec![c], ..Default::default() };
        assert_eq!(validate_model(&m)[0].message, "unknown type Banana");
    }

    #[test]
    fn inherited_attribute_duplicate_is_rejected() {
        let mut m = person_ranger();
        m.classes[0].attributes.push(AttributeDef { name: "name".into(), ty: ValueType::String });
        m.classes[1].attributes.push(AttributeDef { name: "name".into(), ty: ValueType::String });
        assert!(validate_model(&m).iter().any(|d| d.message == "duplicate attribute name"));
    }

    #[test]
    fn self_parameter_is_reserved() {
        let mut c = class("A");
        let mut m = MethodDef::new("Go");
        m.params.push(ParamDef { name: "self".into(), ty: ValueType::Integer });
        c.methods.push(m);
        let model = ClassModel { classes: vec![c], ..Default::default() };
        assert_eq!(validate_model(&model).len(), 1);
    }

    #[test]
    fn resolve_walks_up_and_shadows() {
        let mut m = person_ranger();
        let (owner, def) = m.resolve_method("Ranger", "Notify").unwrap();
        assert_eq!((owner, def.name.as_str()), ("Person", "Notify"));
        m.classes[1].methods.push(MethodDef::new("Notify"));
        assert_eq!(m.resolve_method("Ranger", "Notify").unwrap().0, "Ranger");
        assert!(m.resolve_method("Ranger", "Fly").is_none());
    }

    #[test]
    fn defaults() {
        assert_eq!(default_attribute_value(&ValueType::Integer), DefaultValue::Integer(0));
        assert_eq!(default_attribute_value(&ValueType::String), DefaultValue::String(String::new()));
        assert_eq!(default_attribute_value(&ValueType::Handle("Observer".into())), DefaultValue::NoHandle);
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("_a1"));
        assert!(!is_identifier("1a"));
        assert!(!is_identifier(""));
        assert!(is_relation_id("R12"));
        assert!(!is_relation_id("R"));
        assert!(!is_relation_id("Rx"));
    }
}

//! Importer for the XMI 2.1 subset written by Enterprise Architect style
//! exporters: classes with attributes and operations, generalizations and
//! binary associations. Everything else is skipped with a warning.

use std::collections::{BTreeSet, HashMap};

use roxmltree::{Document, Node};

use super::IngestError;
use crate::model::{
    is_relation_id, AttributeDef, ClassDef, ClassModel, Generalization, MethodDef, ParamDef, RelationDef, RelationKind,
    ValueType,
};

/// Result of an XMI import: the validated model plus skipped-element notes.
#[derive(Debug, Clone)]
pub struct XmiImport {
    pub model: ClassModel,
    pub warnings: Vec<String>,
}

pub fn import_xmi(text: &str) -> Result<XmiImport, IngestError> {
    let doc = Document::parse(text).map_err(|e| IngestError::MalformedXml(e.to_string()))?;
    let mut importer = Importer { ids: HashMap::new(), class_names: HashMap::new(), warnings: Vec::new() };
    for node in doc.descendants().filter(Node::is_element) {
        if let Some(id) = xmi_attr(node, "id") {
            importer.ids.insert(id.to_string(), node);
        }
    }
    let root = doc.root_element();
    let model_node = if root.tag_name().name() == "Model" {
        root
    } else {
        let mut found = None;
        for child in root.children().filter(Node::is_element) {
            if child.tag_name().name() == "Model" && found.is_none() {
                found = Some(child);
            } else {
                importer.warn(format!("skipped element <{}>", qualified(child)));
            }
        }
        found.ok_or_else(|| IngestError::MalformedXml("no uml:Model element".into()))?
    };

    let mut class_nodes = Vec::new();
    let mut association_nodes = Vec::new();
    importer.collect(model_node, &mut class_nodes, &mut association_nodes);
    for node in &class_nodes {
        if let (Some(id), Some(name)) = (xmi_attr(*node, "id"), plain_attr(*node, "name")) {
            importer.class_names.insert(id.to_string(), name.to_string());
        }
    }

    let mut model = ClassModel::default();
    for node in &class_nodes {
        let Some(name) = plain_attr(*node, "name") else {
            importer.warn("skipped uml:Class without a name".to_string());
            continue;
        };
        let mut class = ClassDef::new(name);
        for child in node.children().filter(Node::is_element) {
            match child.tag_name().name() {
                "ownedAttribute" => {
                    // Class-owned association ends belong to the association.
                    if plain_attr(child, "association").is_some() {
                        continue;
                    }
                    match plain_attr(child, "name") {
                        Some(attr) => {
                            let ty = importer.property_type(child, &format!("{name}.{attr}"));
                            class.attributes.push(AttributeDef { name: attr.to_string(), ty });
                        }
                        None => importer.warn(format!("skipped unnamed attribute of {name}")),
                    }
                }
                "ownedOperation" => {
                    if let Some(method) = importer.operation(child, name) {
                        class.methods.push(method);
                    }
                }
                "generalization" => {
                    let general =
                        plain_attr(child, "general").or_else(|| child_idref(child, "general")).ok_or_else(|| {
                            IngestError::MalformedXml(format!("generalization of {name} lacks `general`"))
                        })?;
                    let sup = importer
                        .class_names
                        .get(general)
                        .ok_or_else(|| IngestError::UnresolvableIdref(general.to_string()))?;
                    model.generalizations.push(Generalization { sub: name.to_string(), sup: sup.clone() });
                }
                _ => importer.warn(format!("skipped element <{}> in class {name}", qualified(child))),
            }
        }
        model.classes.push(class);
    }

    let mut relations = Vec::new();
    for node in &association_nodes {
        if let Some(rel) = importer.association(*node)? {
            relations.push(rel);
        }
    }
    model.relations = assign_relation_ids(relations);

    let diagnostics = model.validate();
    if !diagnostics.is_empty() {
        return Err(IngestError::Validation(diagnostics));
    }
    Ok(XmiImport { model, warnings: importer.warnings })
}

/// An association before its relation id is fixed.
struct PendingRelation {
    name: Option<String>,
    kind: RelationKind,
    from: String,
    to: String,
    from_mult: String,
    to_mult: String,
}

struct Importer<'a, 'input> {
    ids: HashMap<String, Node<'a, 'input>>,
    class_names: HashMap<String, String>,
    warnings: Vec<String>,
}

impl<'a, 'input> Importer<'a, 'input> {
    fn warn(&mut self, message: String) {
        self.warnings.push(message);
    }

    fn collect(
        &mut self,
        parent: Node<'a, 'input>,
        classes: &mut Vec<Node<'a, 'input>>,
        assocs: &mut Vec<Node<'a, 'input>>,
    ) {
        for child in parent.children().filter(Node::is_element) {
            if child.tag_name().name() != "packagedElement" {
                self.warn(format!("skipped element <{}>", qualified(child)));
                continue;
            }
            match xmi_attr(child, "type") {
                Some("uml:Package") => self.collect(child, classes, assocs),
                Some("uml:Class") => classes.push(child),
                Some("uml:Association") => assocs.push(child),
                other => {
                    let what = other.unwrap_or("untyped");
                    let name = plain_attr(child, "name").unwrap_or("");
                    self.warn(format!("skipped packagedElement {what} {name}").trim_end().to_string());
                }
            }
        }
    }

    fn operation(&mut self, node: Node<'a, 'input>, class: &str) -> Option<MethodDef> {
        let Some(name) = plain_attr(node, "name") else {
            self.warn(format!("skipped unnamed operation of {class}"));
            return None;
        };
        let mut method = MethodDef::new(name);
        method.is_static = plain_attr(node, "isStatic") == Some("true");
        for param in node.children().filter(Node::is_element) {
            if param.tag_name().name() != "ownedParameter" {
                self.warn(format!("skipped element <{}> in operation {class}.{name}", qualified(param)));
                continue;
            }
            let context = format!("{class}.{name}");
            if plain_attr(param, "direction") == Some("return") {
                method.returns = Some(self.property_type(param, &context));
                continue;
            }
            match plain_attr(param, "name") {
                Some(pname) => {
                    let ty = self.property_type(param, &format!("{context}({pname})"));
                    method.params.push(ParamDef { name: pname.to_string(), ty });
                }
                None => self.warn(format!("skipped unnamed parameter of {context}")),
            }
        }
        Some(method)
    }

    /// Type of an attribute or parameter; untyped elements are Strings.
    fn property_type(&mut self, node: Node<'a, 'input>, context: &str) -> ValueType {
        let reference = plain_attr(node, "type")
            .map(|r| (r, false))
            .or_else(|| child_idref(node, "type").map(|r| (r, false)))
            .or_else(|| {
                node.children()
                    .find(|c| c.is_element() && c.tag_name().name() == "type")
                    .and_then(|c| plain_attr(c, "href"))
                    .map(|href| (href.rsplit('#').next().unwrap_or(href), true))
            });
        let Some((reference, is_href)) = reference else {
            return ValueType::String;
        };
        if !is_href {
            if let Some(class) = self.class_names.get(reference) {
                return ValueType::Handle(class.clone());
            }
        }
        let type_name = match self.ids.get(reference).and_then(|n| plain_attr(*n, "name")) {
            Some(name) => name,
            None => reference,
        };
        match primitive(type_name) {
            Some(ty) => ty,
            None => {
                self.warn(format!("unknown type `{type_name}` of {context}, using String"));
                ValueType::String
            }
        }
    }

    fn association(&mut self, node: Node<'a, 'input>) -> Result<Option<PendingRelation>, IngestError> {
        let mut end_ids: Vec<&str> = node
            .children()
            .filter(|c| c.is_element() && c.tag_name().name() == "memberEnd")
            .filter_map(|c| xmi_attr(c, "idref"))
            .collect();
        if end_ids.is_empty() {
            if let Some(list) = plain_attr(node, "memberEnd") {
                end_ids = list.split_whitespace().collect();
            }
        }
        for child in node.children().filter(Node::is_element) {
            if !matches!(child.tag_name().name(), "memberEnd" | "ownedEnd") {
                self.warn(format!("skipped element <{}> in association", qualified(child)));
            }
        }
        let label = plain_attr(node, "name").unwrap_or("(unnamed)");
        if end_ids.len() != 2 {
            self.warn(format!("skipped association {label} with {} member ends", end_ids.len()));
            return Ok(None);
        }
        let mut ends = Vec::new();
        for id in end_ids {
            let end = *self.ids.get(id).ok_or_else(|| IngestError::UnresolvableIdref(id.to_string()))?;
            let type_ref = plain_attr(end, "type")
                .or_else(|| child_idref(end, "type"))
                .ok_or_else(|| IngestError::MalformedXml(format!("association end {id} has no type")))?;
            let class = self
                .class_names
                .get(type_ref)
                .ok_or_else(|| IngestError::UnresolvableIdref(type_ref.to_string()))?
                .clone();
            let composite = plain_attr(end, "aggregation") == Some("composite");
            ends.push((class, multiplicity(end), composite));
        }
        // The composite-marked end is typed by the part; the whole is `from`.
        let kind = if ends.iter().any(|e| e.2) { RelationKind::Composition } else { RelationKind::Association };
        if ends[0].2 && !ends[1].2 {
            ends.swap(0, 1);
        }
        let (to, from) = (ends.pop().expect("two ends"), ends.pop().expect("two ends"));
        Ok(Some(PendingRelation {
            name: plain_attr(node, "name").map(str::to_string),
            kind,
            from: from.0,
            to: to.0,
            from_mult: from.1,
            to_mult: to.1,
        }))
    }
}

/// Keeps association names that are valid, unique relation ids and numbers
/// the rest with the smallest unused `R<n>`, in document order.
fn assign_relation_ids(pending: Vec<PendingRelation>) -> Vec<RelationDef> {
    let mut taken = BTreeSet::new();
    let named: Vec<bool> = pending
        .iter()
        .map(|p| match &p.name {
            Some(n) if is_relation_id(n) => taken.insert(n.clone()),
            _ => false,
        })
        .collect();
    let mut next = 1u32;
    pending
        .into_iter()
        .zip(named)
        .map(|(p, keep)| {
            let id = if keep {
                p.name.clone().expect("named")
            } else {
                while taken.contains(&format!("R{next}")) {
                    next += 1;
                }
                let id = format!("R{next}");
                taken.insert(id.clone());
                id
            };
            RelationDef { id, kind: p.kind, from: p.from, to: p.to, from_mult: p.from_mult, to_mult: p.to_mult }
        })
        .collect()
}

fn multiplicity(end: Node) -> String {
    let bound = |tag: &str| {
        end.children()
            .find(|c| c.is_element() && c.tag_name().name() == tag)
            .and_then(|c| plain_attr(c, "value"))
            .map(str::trim)
    };
    let lower_zero = matches!(bound("lowerValue"), Some("0") | Some(""));
    let upper_many = match bound("upperValue") {
        Some("*") | Some("-1") => true,
        Some(v) => v.parse::<u64>().map(|n| n > 1).unwrap_or(false),
        None => false,
    };
    match (lower_zero, upper_many) {
        (false, false) => "1",
        (true, false) => "0..1",
        (true, true) => "0..*",
        (false, true) => "1..*",
    }
    .to_string()
}

fn primitive(name: &str) -> Option<ValueType> {
    let base = name.rsplit('_').next().unwrap_or(name).to_ascii_lowercase();
    Some(match base.as_str() {
        "int" | "integer" | "long" | "short" | "byte" => ValueType::Integer,
        "real" | "float" | "double" | "decimal" => ValueType::Real,
        "bool" | "boolean" => ValueType::Boolean,
        "string" | "str" | "char" | "text" => ValueType::String,
        _ => return None,
    })
}

/// Attribute without a namespace. `Node::attribute` with a bare name would
/// also match prefixed attributes such as `xmi:type`.
fn plain_attr<'a>(node: Node<'a, '_>, local: &str) -> Option<&'a str> {
    node.attributes().find(|a| a.namespace().is_none() && a.name() == local).map(|a| a.value())
}

/// Attribute in any namespace with the given local name (`xmi:id`, `xmi:type`).
fn xmi_attr<'a>(node: Node<'a, '_>, local: &str) -> Option<&'a str> {
    node.attributes().find(|a| a.namespace().is_some() && a.name() == local).map(|a| a.value())
}

/// `xmi:idref` of the first child element with the given local name.
fn child_idref<'a>(node: Node<'a, '_>, tag: &str) -> Option<&'a str> {
    node.children().find(|c| c.is_element() && c.tag_name().name() == tag).and_then(|c| xmi_attr(c, "idref"))
}

fn qualified(node: Node) -> String {
    match node.tag_name().namespace().and_then(|ns| node.lookup_prefix(ns)) {
        Some(prefix) if !prefix.is_empty() => format!("{prefix}:{}", node.tag_name().name()),
        _ => node.tag_name().name().to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wrap(body: &str) -> String {
        format!(
            r#"<?xml version="1.0" encoding="UTF-8"?>
<xmi:XMI xmi:version="2.1" xmlns:uml="http://schema.omg.org/spec/UML/2.1" xmlns:xmi="http://schema.omg.org/spec/XMI/2.1">
  <uml:Model xmi:type="uml:Model" name="EA_Model">{body}</uml:Model>
</xmi:XMI>"#
        )
    }

    #[test]
    fn single_empty_class() {
        let import = import_xmi(&wrap(r#"<packagedElement xmi:type="uml:Class" xmi:id="C1" name="Ranger"/>"#)).unwrap();
        assert_eq!(import.model.classes, vec![ClassDef::new("Ranger")]);
    }

    #[test]
    fn generalization_by_idref() {
        let import = import_xmi(&wrap(
            r#"<packagedElement xmi:type="uml:Class" xmi:id="C1" name="Ranger">
                 <generalization xmi:type="uml:Generalization" xmi:id="G1" general="C2"/>
               </packagedElement>
               <packagedElement xmi:type="uml:Class" xmi:id="C2" name="Person"/>"#,
        ))
        .unwrap();
        assert_eq!(import.model.generalizations, vec![Generalization { sub: "Ranger".into(), sup: "Person".into() }]);
    }

    #[test]
    fn dangling_member_end() {
        let err = import_xmi(&wrap(
            r#"<packagedElement xmi:type="uml:Class" xmi:id="C1" name="A"/>
               <packagedElement xmi:type="uml:Association" xmi:id="A1">
                 <memberEnd xmi:idref="nope"/><memberEnd xmi:idref="nope2"/>
               </packagedElement>"#,
        ))
        .unwrap_err();
        assert!(matches!(err, IngestError::UnresolvableIdref(ref id) if id == "nope"), "{err:?}");
    }

    #[test]
    fn malformed_xml() {
        assert!(matches!(import_xmi("<xmi:XMI"), Err(IngestError::MalformedXml(_))));
    }

    #[test]
    fn unknown_elements_warn() {
        let import = import_xmi(&wrap(
            r#"<packagedElement xmi:type="uml:Class" xmi:id="C1" name="A">
                 <ownedComment body="x"/>
               </packagedElement>
               <packagedElement xmi:type="uml:Interface" xmi:id="I1" name="Shape"/>"#,
        ))
        .unwrap();
        assert_eq!(import.warnings.len(), 2, "{:?}", import.warnings);
    }

    #[test]
    fn operations_and_typed_members() {
        let import = import_xmi(&wrap(
            r#"<packagedElement xmi:type="uml:Class" xmi:id="C1" name="Park">
                 <ownedAttribute xmi:type="uml:Property" xmi:id="P1" name="size">
                   <type xmi:idref="EAJava_int"/>
                 </ownedAttribute>
                 <ownedAttribute xmi:type="uml:Property" xmi:id="P2" name="label"/>
                 <ownedOperation xmi:id="O1" name="Count" isStatic="true">
                   <ownedParameter xmi:id="O1R" direction="return" type="EAJava_double"/>
                   <ownedParameter xmi:id="O1P" name="p" direction="in" type="C1"/>
                 </ownedOperation>
               </packagedElement>"#,
        ))
        .unwrap();
        let park = &import.model.classes[0];
        assert_eq!(park.attributes[0].ty, ValueType::Integer);
        assert_eq!(park.attributes[1].ty, ValueType::String);
        let count = &park.methods[0];
        assert!(count.is_static);
        assert_eq!(count.returns, Some(ValueType::Real));
        assert_eq!(count.params[0].ty, ValueType::Handle("Park".into()));
    }

    #[test]
    fn relation_ids_keep_valid_names() {
        let rels = assign_relation_ids(vec![
            PendingRelation {
                name: None,
                kind: RelationKind::Association,
                from: "A".into(),
                to: "B".into(),
                from_mult: "1".into(),
                to_mult: "1".into(),
            },
            PendingRelation {
                name: Some("R1".into()),
                kind: RelationKind::Association,
                from: "A".into(),
                to: "B".into(),
                from_mult: "1".into(),
                to_mult: "1".into(),
            },
        ]);
        assert_eq!(rels[0].id, "R2");
        assert_eq!(rels[1].id, "R1");
    }
}

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::model_json::json_error;
use super::IngestError;
use crate::model::ClassModel;
use crate::oal::{parse_method_body, Diagnostic, MethodAst};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodEntry {
    pub class: String,
    pub method: String,
    pub code: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MethodBundle {
    pub entries: Vec<MethodEntry>,
}

#[derive(Serialize, Deserialize)]
struct BundleDoc {
    methods: Vec<MethodEntry>,
}

pub fn load_method_bundle(text: &str) -> Result<MethodBundle, IngestError> {
    let doc: BundleDoc = serde_json::from_str(text).map_err(json_error)?;
    let mut seen = BTreeSet::new();
    for e in &doc.methods {
        if !seen.insert((e.class.as_str(), e.method.as_str())) {
            return Err(IngestError::DuplicateMethodEntry { class: e.class.clone(), method: e.method.clone() });
        }
    }
    Ok(MethodBundle { entries: doc.methods })
}

pub fn save_method_bundle(bundle: &MethodBundle) -> String {
    let doc = BundleDoc { methods: bundle.entries.clone() };
    let mut text = serde_json::to_string_pretty(&doc).expect("bundle serializes");
    text.push('\n');
    text
}

/// A parse failure in one bundle entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BodyDiagnostic {
    pub class: String,
    pub method: String,
    pub diagnostic: Diagnostic,
}

impl std::fmt::Display for BodyDiagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}.{}:{}", self.class, self.method, self.diagnostic)
    }
}

pub type MethodKey = (String, String);

/// A class model bound to method bodies.
#[derive(Debug, Clone, Default)]
pub struct FusedModel {
    pub model: ClassModel,
    /// Parsed bodies keyed by (declaring class, method).
    pub bodies: BTreeMap<MethodKey, MethodAst>,
    /// Source text of every bound entry, parsed or not.
    pub sources: BTreeMap<MethodKey, String>,
    /// Bundle entries naming a class or method the model does not declare.
    pub unbound: Vec<MethodEntry>,
    pub diagnostics: Vec<BodyDiagnostic>,
}

impl FusedModel {
    pub fn body(&self, class: &str, method: &str) -> Option<&MethodAst> {
        self.bodies.get(&(class.to_string(), method.to_string()))
    }

    pub fn has_errors(&self) -> bool {
        !self.diagnostics.is_empty()
    }
}

/// Binds bundle entries to the methods their (class, method) pair names and
/// parses each body. Binding is tolerant: entries that match nothing are
/// collected in `unbound`, parse failures in `diagnostics`.
pub fn fuse(model: &ClassModel, bundle: &MethodBundle) -> FusedModel {
    let mut fused = FusedModel { model: model.clone(), ..Default::default() };
    for entry in &bundle.entries {
        let declared = model.class(&entry.class).and_then(|c| c.method(&entry.method)).is_some();
        if !declared {
            fused.unbound.push(entry.clone());
            continue;
        }
        let key = (entry.class.clone(), entry.method.clone());
        fused.sources.insert(key.clone(), entry.code.clone());
        match parse_method_body(&entry.code) {
            Ok(ast) => {
                fused.bodies.insert(key, ast);
            }
            Err(diags) => fused.diagnostics.extend(diags.into_iter().map(|diagnostic| BodyDiagnostic {
                class: entry.class.clone(),
                method: entry.method.clone(),
                diagnostic,
            })),
        }
    }
    fused
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ClassDef, MethodDef};

    fn subject_model() -> ClassModel {
        let mut subject = ClassDef::new("Subject");
        subject.methods.push(MethodDef::new("Attach"));
        ClassModel { classes: vec![subject], ..Default::default() }
    }

    fn entry(class: &str, method: &str, code: &str) -> MethodEntry {
        MethodEntry { class: class.into(), method: method.into(), code: code.into() }
    }

    #[test]
    fn bundles() {
        assert!(load_method_bundle(r#"{"methods":[]}"#).unwrap().entries.is_empty());
        let one =
            load_method_bundle(r#"{"methods":[{"class":"Subject","method":"Attach","code":"return;"}]}"#).unwrap();
        assert_eq!(one.entries, vec![entry("Subject", "Attach", "return;")]);
        let dup = r#"{"methods":[{"class":"Subject","method":"Attach","code":""},
                                 {"class":"Subject","method":"Attach","code":"return;"}]}"#;
        assert!(matches!(load_method_bundle(dup), Err(IngestError::DuplicateMethodEntry { .. })));
        assert!(matches!(load_method_bundle("[]"), Err(IngestError::SchemaViolation(_))));
        assert!(matches!(load_method_bundle("{"), Err(IngestError::Malformed { .. })));
    }

    #[test]
    fn fuse_binds_declared_methods() {
        let fused = fuse(&subject_model(), &MethodBundle { entries: vec![entry("Subject", "Attach", "return;")] });
        assert_eq!(fused.bodies.len(), 1);
        assert!(fused.unbound.is_empty());
        assert!(fused.diagnostics.is_empty());
    }

    #[test]
    fn fuse_is_tolerant_of_unknown_names() {
        let fused = fuse(&subject_model(), &MethodBundle { entries: vec![entry("Ghost", "Boo", "return;")] });
        assert!(fused.bodies.is_empty());
        assert_eq!(fused.unbound, vec![entry("Ghost", "Boo", "return;")]);
    }

    #[test]
    fn fuse_reports_parse_failures_with_position() {
        let fused = fuse(&subject_model(), &MethodBundle { entries: vec![entry("Subject", "Attach", "create of;")] });
        assert!(fused.bodies.is_empty());
        assert_eq!(fused.diagnostics.len(), 1);
        assert_eq!(fused.diagnostics[0].diagnostic.span.line, 1);
        assert_eq!(fused.diagnostics[0].method, "Attach");
    }
}

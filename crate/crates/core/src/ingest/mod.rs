//! Loading and saving models, method bundles and their fusion.

mod bundle;
mod model_json;
mod xmi;

pub use bundle::{
    fuse, load_method_bundle, save_method_bundle, BodyDiagnostic, FusedModel, MethodBundle, MethodEntry, MethodKey,
};
pub use model_json::{load_model_json, model_json_compact, save_model_json};
pub use xmi::{import_xmi, XmiImport};

use crate::model::ModelDiagnostic;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("malformed document at line {line}, column {column}: {reason}")]
    Malformed { line: usize, column: usize, reason: String },
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("model validation failed: {}", join_diagnostics(.0))]
    Validation(Vec<ModelDiagnostic>),
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("unresolvable idref `{0}`")]
    UnresolvableIdref(String),
    #[error("duplicate method entry {class}.{method}")]
    DuplicateMethodEntry { class: String, method: String },
}

impl IngestError {
    /// Stable kebab-case name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            IngestError::Malformed { .. } => "malformed-document",
            IngestError::SchemaViolation(_) => "schema-violation",
            IngestError::Validation(_) => "validation-failure",
            IngestError::MalformedXml(_) => "malformed-xml",
            IngestError::UnresolvableIdref(_) => "unresolvable-idref",
            IngestError::DuplicateMethodEntry { .. } => "duplicate-method-entry",
        }
    }
}

fn join_diagnostics(diags: &[ModelDiagnostic]) -> String {
    diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Loads a model file's text, choosing the XMI importer for XML content and
/// the Model JSON loader otherwise. Returns import warnings alongside.
pub fn load_model_auto(path_hint: &str, text: &str) -> Result<(crate::model::ClassModel, Vec<String>), IngestError> {
    let lower = path_hint.to_ascii_lowercase();
    let looks_xml = lower.ends_with(".xmi") || lower.ends_with(".xml") || text.trim_start().starts_with('<');
    if looks_xml {
        let import = import_xmi(text)?;
        Ok((import.model, import.warnings))
    } else {
        Ok((load_model_json(text)?, Vec::new()))
    }
}

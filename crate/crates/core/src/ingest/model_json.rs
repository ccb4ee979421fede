use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::model::{
    AttributeDef, ClassDef, ClassModel, Generalization, MethodDef, ParamDef, RelationDef, RelationKind, ValueType,
};

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    classes: Vec<ClassDoc>,
    #[serde(default)]
    relations: Vec<RelationDoc>,
    #[serde(default)]
    generalizations: Vec<GeneralizationDoc>,
}

#[derive(Serialize, Deserialize)]
struct ClassDoc {
    name: String,
    #[serde(default)]
    attributes: Vec<TypedName>,
    #[serde(default)]
    methods: Vec<MethodDoc>,
}

#[derive(Serialize, Deserialize)]
struct TypedName {
    name: String,
    #[serde(rename = "type")]
    ty: String,
}

#[derive(Serialize, Deserialize)]
struct MethodDoc {
    name: String,
    #[serde(rename = "static", default)]
    is_static: bool,
    #[serde(default)]
    params: Vec<TypedName>,
    #[serde(default)]
    returns: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum KindDoc {
    Association,
    Composition,
}

#[derive(Serialize, Deserialize)]
struct RelationDoc {
    id: String,
    kind: KindDoc,
    from: String,
    to: String,
    #[serde(rename = "fromMult")]
    from_mult: String,
    #[serde(rename = "toMult")]
    to_mult: String,
}

#[derive(Serialize, Deserialize)]
struct GeneralizationDoc {
    sub: String,
    #[serde(rename = "super")]
    sup: String,
}

pub(crate) fn json_error(e: serde_json::Error) -> IngestError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => IngestError::SchemaViolation(e.to_string()),
        _ => IngestError::Malformed { line: e.line(), column: e.column(), reason: e.to_string() },
    }
}

/// Parses a Model JSON document and validates it.
pub fn load_model_json(text: &str) -> Result<ClassModel, IngestError> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(json_error)?;
    let model = ClassModel {
        classes: doc
            .classes
            .into_iter()
            .map(|c| ClassDef {
                name: c.name,
                attributes: c
                    .attributes
                    .into_iter()
                    .map(|a| AttributeDef { name: a.name, ty: ValueType::from_name(&a.ty) })
                    .collect(),
                methods: c
                    .methods
                    .into_iter()
                    .map(|m| MethodDef {
                        name: m.name,
                        is_static: m.is_static,
                        params: m
                            .params
                            .into_iter()
                            .map(|p| ParamDef { name: p.name, ty: ValueType::from_name(&p.ty) })
                            .collect(),
                        returns: m.returns.as_deref().map(ValueType::from_name),
                    })
                    .collect(),
            })
            .collect(),
        relations: doc
            .relations
            .into_iter()
            .map(|r| RelationDef {
                id: r.id,
                kind: match r.kind {
                    KindDoc::Association => RelationKind::Association,
                    KindDoc::Composition => RelationKind::Composition,
                },
                from: r.from,
                to: r.to,
                from_mult: r.from_mult,
                to_mult: r.to_mult,
            })
            .collect(),
        generalizations: doc.generalizations.into_iter().map(|g| Generalization { sub: g.sub, sup: g.sup }).collect(),
    };
    let diagnostics = model.validate();
    if diagnostics.is_empty() {
        Ok(model)
    } else {
        Err(IngestError::Validation(diagnostics))
    }
}

fn typed(name: &str, ty: &ValueType) -> TypedName {
    TypedName { name: name.to_string(), ty: ty.name().to_string() }
}

fn to_doc(model: &ClassModel) -> ModelDoc {
    ModelDoc {
        classes: model
            .classes
            .iter()
            .map(|c| ClassDoc {
                name: c.name.clone(),
                attributes: c.attributes.iter().map(|a| typed(&a.name, &a.ty)).collect(),
                methods: c
                    .methods
                    .iter()
                    .map(|m| MethodDoc {
                        name: m.name.clone(),
                        is_static: m.is_static,
                        params: m.params.iter().map(|p| typed(&p.name, &p.ty)).collect(),
                        returns: m.returns.as_ref().map(|t| t.name().to_string()),
                    })
                    .collect(),
            })
            .collect(),
        relations: model
            .relations
            .iter()
            .map(|r| RelationDoc {
                id: r.id.clone(),
                kind: match r.kind {
                    RelationKind::Association => KindDoc::Association,
                    RelationKind::Composition => KindDoc::Composition,
                },
                from: r.from.clone(),
                to: r.to.clone(),
                from_mult: r.from_mult.clone(),
                to_mult: r.to_mult.clone(),
            })
            .collect(),
        generalizations: model
            .generalizations
            .iter()
            .map(|g| GeneralizationDoc { sub: g.sub.clone(), sup: g.sup.clone() })
            .collect(),
    }
}

/// Pretty-printed Model JSON with a trailing newline.
pub fn save_model_json(model: &ClassModel) -> String {
    let mut text = serde_json::to_string_pretty(&to_doc(model)).expect("model serializes");
    text.push('\n');
    text
}

/// Single-line Model JSON, as carried in protocol replies.
pub fn model_json_compact(model: &ClassModel) -> String {
    serde_json::to_string(&to_doc(model)).expect("model serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document() {
        let m = load_model_json(r#"{"classes":[],"relations":[],"generalizations":[]}"#).unwrap();
        assert_eq!(m, ClassModel::default());
    }

    #[test]
    fn missing_classes_is_schema_violation() {
        let err = load_model_json(r#"{"relations":[],"generalizations":[]}"#).unwrap_err();
        assert!(matches!(err, IngestError::SchemaViolation(ref m) if m.contains("classes")), "{err:?}");
    }

    #[test]
    fn syntax_error_is_malformed() {
        let err = load_model_json("{\"classes\": [").unwrap_err();
        assert!(matches!(err, IngestError::Malformed { line: 1, .. }), "{err:?}");
    }

    #[test]
    fn unknown_attribute_type_fails_validation() {
        let doc = r#"{"classes":[{"name":"Fruit","attributes":[{"name":"k","type":"Banana"}],"methods":[]}],
                      "relations":[],"generalizations":[]}"#;
        match load_model_json(doc).unwrap_err() {
            IngestError::Validation(diags) => assert_eq!(diags[0].message, "unknown type Banana"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn save_then_load_is_stable() {
        let doc = r#"{"classes":[{"name":"Subject","attributes":[{"name":"n","type":"Integer"}],
            "methods":[{"name":"Attach","static":false,"params":[{"name":"o","type":"Observer"}],"returns":null}]},
            {"name":"Observer","methods":[{"name":"Count","static":true,"returns":"Integer"}]}],
            "relations":[{"id":"R1","kind":"association","from":"Subject","to":"Observer","fromMult":"1","toMult":"0..*"}],
            "generalizations":[]}"#;
        let m = load_model_json(doc).unwrap();
        let saved = save_model_json(&m);
        assert_eq!(load_model_json(&saved).unwrap(), m);
        assert_eq!(save_model_json(&load_model_json(&saved).unwrap()), saved);
        assert!(saved.contains("\"fromMult\": \"1\""));
    }
}

//! Translation of a fused model into one self-contained Python 3 program.
//!
//! The program mirrors the interpreter: same instance ids, same error
//! points, same command budget. Run directly, it prints the final state in
//! the exact form of [`Snapshot::to_json`](crate::runtime::Snapshot::to_json)
//! followed by a newline.

mod python;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use thiserror::Error;

use crate::ingest::FusedModel;
use crate::model::ClassModel;
use crate::runtime::{StartError, DEFAULT_STEP_BUDGET};
use crate::value::Value;

pub(crate) const PRELUDE: &str = include_str!("prelude.py");

/// Globals the emitted code defines after the prelude.
const EMITTED_GLOBALS: [&str; 9] = [
    "_OAL_BUDGET",
    "_OAL_CLASSES",
    "_OAL_LINEAGE",
    "_OAL_ATTR_TYPES",
    "_OAL_RELATIONS",
    "_OAL_METHODS",
    "_OAL_REGISTRY",
    "_oal_links",
    "_oal_entry",
];

const KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue", "def", "del",
    "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in", "is", "lambda", "nonlocal",
    "not", "or", "pass", "raise", "return", "try", "while", "with", "yield",
];

const BUILTINS: &[&str] = &[
    "ArithmeticError",
    "AssertionError",
    "AttributeError",
    "BaseException",
    "BlockingIOError",
    "BrokenPipeError",
    "BufferError",
    "BytesWarning",
    "ChildProcessError",
    "ConnectionAbortedError",
    "ConnectionError",
    "ConnectionRefusedError",
    "ConnectionResetError",
    "DeprecationWarning",
    "EOFError",
    "Ellipsis",
    "EncodingWarning",
    "EnvironmentError",
    "Exception",
    "FileExistsError",
    "FileNotFoundError",
    "FloatingPointError",
    "FutureWarning",
    "GeneratorExit",
    "IOError",
    "ImportError",
    "ImportWarning",
    "IndentationError",
    "IndexError",
    "InterruptedError",
    "IsADirectoryError",
    "KeyError",
    "KeyboardInterrupt",
    "LookupError",
    "MemoryError",
    "ModuleNotFoundError",
    "NameError",
    "NotADirectoryError",
    "NotImplemented",
    "NotImplementedError",
    "OSError",
    "OverflowError",
    "PendingDeprecationWarning",
    "PermissionError",
    "ProcessLookupError",
    "RecursionError",
    "ReferenceError",
    "ResourceWarning",
    "RuntimeError",
    "RuntimeWarning",
    "StopAsyncIteration",
    "StopIteration",
    "SyntaxError",
    "SyntaxWarning",
    "SystemError",
    "SystemExit",
    "TabError",
    "TimeoutError",
    "TypeError",
    "UnboundLocalError",
    "UnicodeDecodeError",
    "UnicodeEncodeError",
    "UnicodeError",
    "UnicodeTranslateError",
    "UnicodeWarning",
    "UserWarning",
    "ValueError",
    "Warning",
    "ZeroDivisionError",
    "BaseExceptionGroup",
    "ExceptionGroup",
    "abs",
    "aiter",
    "all",
    "anext",
    "any",
    "ascii",
    "bin",
    "bool",
    "breakpoint",
    "bytearray",
    "bytes",
    "callable",
    "chr",
    "classmethod",
    "compile",
    "complex",
    "copyright",
    "credits",
    "delattr",
    "dict",
    "dir",
    "divmod",
    "enumerate",
    "eval",
    "exec",
    "exit",
    "filter",
    "float",
    "format",
    "frozenset",
    "getattr",
    "globals",
    "hasattr",
    "hash",
    "help",
    "hex",
    "id",
    "input",
    "int",
    "isinstance",
    "issubclass",
    "iter",
    "len",
    "license",
    "list",
    "locals",
    "map",
    "max",
    "memoryview",
    "min",
    "next",
    "object",
    "oct",
    "open",
    "ord",
    "pow",
    "print",
    "property",
    "quit",
    "range",
    "repr",
    "reversed",
    "round",
    "set",
    "setattr",
    "slice",
    "sorted",
    "staticmethod",
    "str",
    "sum",
    "super",
    "tuple",
    "type",
    "vars",
    "zip",
    "json",
    "sys",
    "threading",
];

/// Top-level names of the prelude.
fn prelude_globals() -> &'static BTreeSet<String> {
    static NAMES: OnceLock<BTreeSet<String>> = OnceLock::new();
    NAMES.get_or_init(|| {
        PRELUDE
            .lines()
            .filter(|l| !l.starts_with(' '))
            .filter_map(|l| {
                let l = l.strip_prefix("def ").or_else(|| l.strip_prefix("class ")).unwrap_or(l);
                let end = l.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))?;
                (end > 0 && !l.starts_with("import")).then(|| l[..end].to_string())
            })
            .collect()
    })
}

fn is_reserved(name: &str) -> bool {
    KEYWORDS.contains(&name)
        || BUILTINS.contains(&name)
        || EMITTED_GLOBALS.contains(&name)
        || (name.starts_with("__") && name.ends_with("__"))
        || prelude_globals().contains(name)
}

/// Appends `_` while `name` is a reserved word of the target or already taken.
pub fn sanitize_identifier(name: &str, taken: &BTreeSet<String>) -> String {
    let mut out = name.to_string();
    while is_reserved(&out) || taken.contains(&out) {
        out.push('_');
    }
    out
}

/// Injective mapping of model names onto emitted identifiers.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameMap {
    map: BTreeMap<String, String>,
    taken: BTreeSet<String>,
}

impl NameMap {
    pub fn insert(&mut self, name: &str) -> String {
        self.insert_as(name, name)
    }

    /// Maps `name` to the sanitized form of `candidate`.
    pub fn insert_as(&mut self, name: &str, candidate: &str) -> String {
        if let Some(done) = self.map.get(name) {
            return done.clone();
        }
        let emitted = sanitize_identifier(candidate, &self.taken);
        self.taken.insert(emitted.clone());
        self.map.insert(name.to_string(), emitted.clone());
        emitted
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.map.get(name).map(String::as_str)
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.map
    }
}

/// Superclasses before subclasses; otherwise model order.
pub fn topo_order_classes(m: &ClassModel) -> Vec<String> {
    let mut placed: BTreeSet<&str> = BTreeSet::new();
    let mut out = Vec::with_capacity(m.classes.len());
    while out.len() < m.classes.len() {
        let next = m
            .classes
            .iter()
            .find(|c| !placed.contains(c.name.as_str()) && m.parent(&c.name).is_none_or(|p| placed.contains(p)));
        match next {
            Some(c) => {
                placed.insert(&c.name);
                out.push(c.name.clone());
            }
            // Only reachable on a cyclic (unvalidated) model.
            None => {
                for c in &m.classes {
                    if placed.insert(&c.name) {
                        out.push(c.name.clone());
                    }
                }
            }
        }
    }
    out
}

/// The method the generated program runs under its main guard.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub class: String,
    pub method: String,
    pub args: Vec<Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenOptions {
    pub step_budget: u64,
    /// Emit a no-op for declared methods without code instead of failing.
    pub noop_unbound: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions { step_budget: DEFAULT_STEP_BUDGET, noop_unbound: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenUnit {
    pub source: String,
    /// Model class name to emitted class name.
    pub name_map: BTreeMap<String, String>,
    pub entry: Option<(String, String)>,
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("{class}.{method} has no code")]
    UnboundBody { class: String, method: String },
    #[error("invalid entry: {0}")]
    InvalidEntry(StartError),
    #[error("method bodies have {0} parse error(s)")]
    ParseErrors(usize),
}

impl GenError {
    pub fn kind(&self) -> &'static str {
        match self {
            GenError::UnboundBody { .. } => "unbound-body",
            GenError::InvalidEntry(_) => "invalid-entry",
            GenError::ParseErrors(_) => "parse-errors",
        }
    }
}

pub fn generate_program(fused: &FusedModel, entry: Option<&Entry>, options: GenOptions) -> Result<GenUnit, GenError> {
    if fused.has_errors() {
        return Err(GenError::ParseErrors(fused.diagnostics.len()));
    }
    let entry = match entry {
        Some(e) => {
            let (owner, def) =
                crate::runtime::check_entry(fused, &e.class, &e.method, &e.args).map_err(GenError::InvalidEntry)?;
            Some((e, owner, def.is_static))
        }
        None => None,
    };
    if !options.noop_unbound {
        for class in &fused.model.classes {
            for m in &class.methods {
                if fused.body(&class.name, &m.name).is_none() {
                    return Err(GenError::UnboundBody { class: class.name.clone(), method: m.name.clone() });
                }
            }
        }
    }
    let (source, names) = python::emit(fused, entry.as_ref().map(|(e, o, s)| (*e, o.as_str(), *s)), options);
    Ok(GenUnit {
        source,
        name_map: names.entries().clone(),
        entry: entry.map(|(e, _, _)| (e.class.clone(), e.method.clone())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ClassDef, Generalization};

    fn model(classes: &[&str], gens: &[(&str, &str)]) -> ClassModel {
        ClassModel {
            classes: classes.iter().map(|c| ClassDef::new(*c)).collect(),
            relations: vec![],
            generalizations: gens
                .iter()
                .map(|(sub, sup)| Generalization { sub: sub.to_string(), sup: sup.to_string() })
                .collect(),
        }
    }

    #[test]
    fn topo_order() {
        assert_eq!(topo_order_classes(&model(&["Ranger", "Person"], &[("Ranger", "Person")])), ["Person", "Ranger"]);
        assert_eq!(topo_order_classes(&model(&["B", "A"], &[])), ["B", "A"]);
        assert_eq!(topo_order_classes(&model(&["C", "B", "A"], &[("C", "B"), ("B", "A")])), ["A", "B", "C"]);
    }

    #[test]
    fn sanitize() {
        let mut taken = BTreeSet::new();
        assert_eq!(sanitize_identifier("Ranger", &taken), "Ranger");
        assert_eq!(sanitize_identifier("return", &taken), "return_");
        taken.insert("return_".to_string());
        assert_eq!(sanitize_identifier("return", &taken), "return__");
        assert_eq!(sanitize_identifier("_oal_call", &taken), "_oal_call_");
        assert_eq!(sanitize_identifier("print", &taken), "print_");
    }

    #[test]
    fn name_map_is_injective() {
        let mut names = NameMap::default();
        assert_eq!(names.insert("class"), "class_");
        assert_eq!(names.insert("class_"), "class__");
        assert_eq!(names.insert("class"), "class_");
        assert_eq!(names.get("class_"), Some("class__"));
    }

    #[test]
    fn prelude_names_are_reserved() {
        for name in ["_oal_cmd", "_OalSet", "_oal_void", "__dump_state__", "_OAL_MAX_DEPTH", "_oal_live"] {
            assert!(prelude_globals().contains(name) || is_reserved(name), "{name}");
        }
    }
}

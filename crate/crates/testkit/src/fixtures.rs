use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::Value as Json;
use xuml_core::codegen::{generate_program, Entry, GenOptions, GenUnit};
use xuml_core::ingest::{fuse, load_method_bundle, load_model_json, FusedModel};
use xuml_core::runtime::{self, SessionOptions, Snapshot, DEFAULT_STEP_BUDGET};
use xuml_core::trace::TraceEvent;
use xuml_core::value::Value;

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

/// Contents of a fixture's `run.json`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub class: String,
    pub method: String,
    pub args: Vec<Value>,
    pub step_budget: Option<u64>,
}

impl RunSpec {
    pub fn parse(text: &str) -> Result<RunSpec, String> {
        let json: Json = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let entry = json["entry"].as_str().ok_or("run.json needs an `entry` string")?;
        let (class, method) = entry.split_once('.').ok_or("entry must be Class.method")?;
        let args = match json.get("args") {
            Some(Json::Array(items)) => items.iter().map(Value::from_json).collect::<Result<_, _>>()?,
            Some(_) => return Err("`args` must be a list".into()),
            None => Vec::new(),
        };
        Ok(RunSpec {
            class: class.to_string(),
            method: method.to_string(),
            args,
            step_budget: json.get("step_budget").and_then(Json::as_u64),
        })
    }

    pub fn entry(&self) -> String {
        format!("{}.{}", self.class, self.method)
    }

    pub fn budget(&self) -> u64 {
        self.step_budget.unwrap_or(DEFAULT_STEP_BUDGET)
    }
}

/// One directory of the corpus: `model.json`, `methods.json`, `run.json`.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub dir: PathBuf,
    pub model_json: String,
    pub methods_json: String,
    pub run: RunSpec,
}

impl Fixture {
    pub fn load(name: &str) -> Fixture {
        let dir = fixtures_dir().join(name);
        let read = |file: &str| fs::read_to_string(dir.join(file)).unwrap_or_else(|e| panic!("{name}/{file}: {e}"));
        let run = RunSpec::parse(&read("run.json")).unwrap_or_else(|e| panic!("{name}/run.json: {e}"));
        Fixture { name: name.to_string(), model_json: read("model.json"), methods_json: read("methods.json"), run, dir }
    }

    /// Every fixture directory, sorted by name.
    pub fn all() -> Vec<Fixture> {
        let mut names: Vec<String> = fs::read_dir(fixtures_dir())
            .expect("fixtures directory")
            .filter_map(|e| e.ok())
            .filter(|e| e.path().join("run.json").is_file())
            .map(|e| e.file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        names.iter().map(|n| Fixture::load(n)).collect()
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }

    pub fn fused(&self) -> Arc<FusedModel> {
        let model = load_model_json(&self.model_json).unwrap_or_else(|e| panic!("{}: {e}", self.name));
        let bundle = load_method_bundle(&self.methods_json).unwrap_or_else(|e| panic!("{}: {e}", self.name));
        let fused = fuse(&model, &bundle);
        assert!(!fused.has_errors(), "{}: {:?}", self.name, fused.diagnostics);
        Arc::new(fused)
    }

    pub fn options(&self) -> SessionOptions {
        SessionOptions { step_budget: self.run.budget() }
    }

    pub fn execute(&self) -> (Snapshot, Vec<TraceEvent>) {
        runtime::run(self.fused(), &self.run.class, &self.run.method, self.run.args.clone(), self.options())
            .unwrap_or_else(|e| panic!("{}: {e}", self.name))
    }

    pub fn generate(&self) -> GenUnit {
        let entry =
            Entry { class: self.run.class.clone(), method: self.run.method.clone(), args: self.run.args.clone() };
        let options = GenOptions { step_budget: self.run.budget(), ..GenOptions::default() };
        generate_program(&self.fused(), Some(&entry), options).unwrap_or_else(|e| panic!("{}: {e}", self.name))
    }
}

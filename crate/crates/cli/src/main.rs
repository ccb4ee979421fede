use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use xuml_core::codegen::{generate_program, Entry, GenError, GenOptions};
use xuml_core::ingest::{
    fuse, import_xmi, load_method_bundle, load_model_auto, save_model_json, FusedModel, IngestError,
};
use xuml_core::model::{is_identifier, ClassModel};
use xuml_core::runtime::{start_session, SessionOptions, Status, DEFAULT_STEP_BUDGET};
use xuml_core::trace::serialize_log;
use xuml_core::value::{parse_value_list, Value};
use xuml_stepd::{serve_stdio, WsServer};

#[derive(Parser)]
#[command(name = "xuml", version, about = "Validate, run, trace and translate executable class models")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct Inputs {
    /// Model JSON or XMI file
    #[arg(long)]
    model: PathBuf,
    /// Method bundle JSON
    #[arg(long)]
    methods: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a model and its method bundle; exit 0 iff there are no errors
    Validate { model: PathBuf, methods: PathBuf },
    /// Convert an XMI 2.1 export to Model JSON
    ImportXmi {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Execute from an entry method and print the final snapshot
    Run {
        #[command(flatten)]
        inputs: Inputs,
        /// Class.Method
        #[arg(long, value_parser = parse_entry)]
        entry: (String, String),
        /// JSON list of tagged values, e.g. '[{"t":"int","v":3}]'
        #[arg(long, value_parser = parse_args)]
        args: Option<ArgList>,
        /// Write the JSONL event trace here
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        max_steps: u64,
    },
    /// Translate to a single-file Python 3 program
    Gen {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(short, long)]
        output: PathBuf,
        /// Method the program runs when executed directly
        #[arg(long, value_parser = parse_entry)]
        entry: Option<(String, String)>,
        #[arg(long, value_parser = parse_args, requires = "entry")]
        args: Option<ArgList>,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        max_steps: u64,
    },
    /// Serve the stepping protocol over WebSocket, or stdio with --stdio
    Serve {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = 8765)]
        port: u16,
        #[arg(long)]
        stdio: bool,
        #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
        max_steps: u64,
    },
}

fn parse_entry(s: &str) -> Result<(String, String), String> {
    match s.split_once('.') {
        Some((c, m)) if is_identifier(c) && is_identifier(m) => Ok((c.to_string(), m.to_string())),
        _ => Err(format!("`{s}` is not Class.Method")),
    }
}

#[derive(Clone)]
struct ArgList(Vec<Value>);

fn parse_args(s: &str) -> Result<ArgList, String> {
    parse_value_list(s).map(ArgList)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_model(path: &Path) -> Result<ClassModel> {
    let (model, warnings) =
        load_model_auto(&path.to_string_lossy(), &read(path)?).with_context(|| format!("{}", path.display()))?;
    for w in warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(model)
}

/// Loads and fuses; body parse errors are fatal.
fn load_fused(inputs: &Inputs) -> Result<Arc<FusedModel>> {
    let model = load_model(&inputs.model)?;
    let bundle =
        load_method_bundle(&read(&inputs.methods)?).with_context(|| format!("{}", inputs.methods.display()))?;
    let fused = fuse(&model, &bundle);
    for e in &fused.unbound {
        eprintln!("warning: bundle entry {}.{} matches no declared method", e.class, e.method);
    }
    if fused.has_errors() {
        for d in &fused.diagnostics {
            eprintln!("{}.{}:{}", d.class, d.method, d.diagnostic);
        }
        bail!("method bodies have {} error(s)", fused.diagnostics.len());
    }
    Ok(Arc::new(fused))
}

fn validate(model_path: &Path, methods_path: &Path) -> Result<ExitCode> {
    let mut errors = 0;
    let model = match load_model_auto(&model_path.to_string_lossy(), &read(model_path)?) {
        Ok((model, warnings)) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            model
        }
        Err(IngestError::Validation(diags)) => {
            for d in &diags {
                eprintln!("error: {d}");
            }
            return Ok(ExitCode::FAILURE);
        }
        Err(e) => return Err(e).with_context(|| format!("{}", model_path.display())),
    };
    let bundle = load_method_bundle(&read(methods_path)?).with_context(|| format!("{}", methods_path.display()))?;
    let fused = fuse(&model, &bundle);
    for e in &fused.unbound {
        eprintln!("warning: bundle entry {}.{} matches no declared method", e.class, e.method);
    }
    for d in &fused.diagnostics {
        eprintln!("{}.{}:{}", d.class, d.method, d.diagnostic);
        errors += 1;
    }
    Ok(if errors == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Cmd::Validate { model, methods } => validate(&model, &methods),
        Cmd::ImportXmi { input, output } => {
            let import = import_xmi(&read(&input)?).with_context(|| format!("{}", input.display()))?;
            for w in &import.warnings {
                eprintln!("warning: {w}");
            }
            fs::write(&output, save_model_json(&import.model))
                .with_context(|| format!("cannot write {}", output.display()))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Run { inputs, entry, args, trace, max_steps } => {
            let fused = load_fused(&inputs)?;
            let options = SessionOptions { step_budget: max_steps };
            let args = args.map(|a| a.0).unwrap_or_default();
            let mut session = match start_session(fused, &entry.0, &entry.1, args, options) {
                Ok(session) => session,
                Err(e) => bail!("{}: {e}", e.kind()),
            };
            let snapshot = session.run_to_completion();
            if let Some(path) = trace {
                fs::write(&path, serialize_log(session.events()))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            println!("{}", snapshot.to_json());
            if let Some(err) = session.error() {
                eprintln!("error: {}: {}", err.kind.as_str(), err.message);
            }
            Ok(if snapshot.status == Status::Finished { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Cmd::Gen { inputs, output, entry, args, max_steps } => {
            let fused = load_fused(&inputs)?;
            let entry =
                entry.map(|(class, method)| Entry { class, method, args: args.map(|a| a.0).unwrap_or_default() });
            let options = GenOptions { step_budget: max_steps, ..GenOptions::default() };
            let unit = match generate_program(&fused, entry.as_ref(), options) {
                Ok(unit) => unit,
                Err(GenError::InvalidEntry(e)) => bail!("{}: {e}", e.kind()),
                Err(e) => bail!("{}: {e}", e.kind()),
            };
            fs::write(&output, unit.source).with_context(|| format!("cannot write {}", output.display()))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Serve { inputs, port, stdio, max_steps } => {
            let fused = load_fused(&inputs)?;
            let options = SessionOptions { step_budget: max_steps };
            if stdio {
                serve_stdio(fused, options)?;
            } else {
                let server = WsServer::bind(&format!("127.0.0.1:{port}"), fused, options)?;
                eprintln!("listening on ws://{}", server.local_addr()?);
                server.serve()?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

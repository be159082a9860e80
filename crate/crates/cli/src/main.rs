//! `vizact`: validate, compile, explain, run and render interaction
//! documents, scaffold examples, and serve the playground protocol.

mod serve;
mod session;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vizact_core::compiler::compile_document;
use vizact_core::compiler::explain::{explain_document, to_json, to_markdown};
use vizact_core::diag::has_errors;
use vizact_core::fixtures;
use vizact_core::interaction::EventScript;
use vizact_core::model::{parse_document_with, DirResolver, Document};
use vizact_core::registry::Registry;
use vizact_core::runtime::{to_jsonl, Runtime};
use vizact_core::Diagnostic;

#[derive(Parser)]
#[command(name = "vizact", version, about = "Interaction grammar compiler and headless runtime")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a document and print its diagnostics as JSON lines
    Validate { path: PathBuf },
    /// Lower every interaction unit to its component graph
    Compile {
        path: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Classify every unit and print the action table
    Explain {
        path: PathBuf,
        #[arg(short, long, value_enum, default_value_t = Format::Md)]
        format: Format,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Replay an event script and write the trace as JSON lines
    Run {
        path: PathBuf,
        script: Option<PathBuf>,
        #[arg(long = "script", conflicts_with = "script")]
        script_flag: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Render the page as SVG after replaying events up to a tick
    Render {
        path: PathBuf,
        script: Option<PathBuf>,
        #[arg(long = "script", conflicts_with = "script")]
        script_flag: Option<PathBuf>,
        #[arg(short, long)]
        tick: Option<u64>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Write a shipped example document and its script
    Init {
        example: String,
        /// Target directory
        #[arg(short, long, default_value = ".")]
        out: PathBuf,
    },
    /// Serve the playground protocol over WebSocket
    Serve {
        #[arg(short, long, default_value_t = 8765)]
        port: u16,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Md,
    Json,
}

enum Failure {
    /// Input file missing or unreadable.
    Io(String),
    Diagnostics(Vec<Diagnostic>),
    Message(String),
}

impl Failure {
    fn exit(self) -> ExitCode {
        match self {
            Failure::Io(m) => {
                eprintln!("{m}");
                ExitCode::from(3)
            }
            Failure::Diagnostics(d) => {
                for x in &d {
                    eprintln!("{}", x.to_json_line());
                }
                ExitCode::from(1)
            }
            Failure::Message(m) => {
                eprintln!("{m}");
                ExitCode::from(1)
            }
        }
    }
}

type Res<T> = Result<T, Failure>;

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read `{}`: {e}", path.display())))
}

fn registry() -> Res<&'static Registry> {
    match std::env::var_os("VIZACT_REGISTRY") {
        None => Ok(Registry::builtin()),
        Some(p) => {
            let text = read(Path::new(&p))?;
            let r = Registry::from_json(&text).map_err(|e| Failure::Message(format!("invalid registry: {e}")))?;
            Ok(Box::leak(Box::new(r)))
        }
    }
}

fn load(path: &Path) -> Res<(Document, Vec<Diagnostic>)> {
    let text = read(path)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_document_with(&text, &DirResolver(dir)).map_err(Failure::Diagnostics)
}

fn script(path: &Path) -> Res<EventScript> {
    EventScript::parse(&read(path)?).map_err(|d| Failure::Diagnostics(vec![d]))
}

fn emit(out: Option<&Path>, text: &str) -> Res<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Message(format!("cannot write `{}`: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cmd: Cmd) -> Res<()> {
    match cmd {
        Cmd::Validate { path } => {
            let (doc, mut diags) = match load(&path) {
                Err(Failure::Diagnostics(d)) => (None, d),
                Err(f) => return Err(f),
                Ok((doc, w)) => (Some(doc), w),
            };
            if let Some(doc) = doc {
                diags.extend(compile_document(registry()?, &doc).diagnostics);
            }
            for d in &diags {
                println!("{}", d.to_json_line());
            }
            if has_errors(&diags) {
                return Err(Failure::Diagnostics(Vec::new()));
            }
        }
        Cmd::Compile { path, out } => {
            let (doc, _) = load(&path)?;
            let compiled = compile_document(registry()?, &doc);
            if has_errors(&compiled.diagnostics) {
                return Err(Failure::Diagnostics(compiled.diagnostics));
            }
            let text = serde_json::to_string_pretty(&compiled).expect("compiled output serializes") + "\n";
            emit(out.as_deref(), &text)?;
        }
        Cmd::Explain { path, format, out } => {
            let (doc, _) = load(&path)?;
            let r = registry()?;
            let reports = explain_document(r, &doc).map_err(Failure::Diagnostics)?;
            let text = match format {
                Format::Md => to_markdown(r, &reports),
                Format::Json => serde_json::to_string_pretty(&to_json(r, &reports)).expect("report serializes") + "\n",
            };
            emit(out.as_deref(), &text)?;
        }
        Cmd::Run { path, script: s, script_flag, out } => {
            let (doc, _) = load(&path)?;
            let s = s.or(script_flag).ok_or_else(|| Failure::Message("`run` needs an event script".into()))?;
            let s = script(&s)?;
            let mut rt = Runtime::load(registry()?, &doc).map_err(Failure::Diagnostics)?;
            let trace: Vec<_> = s.events.iter().map(|e| rt.dispatch(e)).collect();
            emit(out.as_deref(), &to_jsonl(&trace))?;
        }
        Cmd::Render { path, script: s, script_flag, tick, out } => {
            let (doc, _) = load(&path)?;
            let mut rt = Runtime::load(registry()?, &doc).map_err(Failure::Diagnostics)?;
            if let Some(s) = s.or(script_flag) {
                for e in script(&s)?.events.iter().filter(|e| tick.is_none_or(|t| e.tick <= t)) {
                    rt.dispatch(e);
                }
            }
            emit(out.as_deref(), &rt.render_page())?;
        }
        Cmd::Init { example, out } => {
            let f = fixtures::get(&example).ok_or_else(|| {
                let names: Vec<&str> = fixtures::ALL.iter().map(|f| f.name).collect();
                Failure::Message(format!("unknown example `{example}`; one of: {}", names.join(", ")))
            })?;
            let scripts = out.join("scripts");
            std::fs::create_dir_all(&scripts).map_err(|e| Failure::Message(e.to_string()))?;
            let doc = out.join(format!("{example}.json"));
            let script = scripts.join(format!("{example}.json"));
            emit(Some(&doc), f.doc)?;
            emit(Some(&script), f.script)?;
            println!("{}\n{}", doc.display(), script.display());
        }
        Cmd::Serve { port } => {
            serve::serve(registry()?, port).map_err(|e| Failure::Message(format!("serve failed: {e}")))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.exit(),
    }
}

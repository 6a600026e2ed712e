//! `kolmo`: one binary for every experiment, sharing config and cache.

mod args;
mod commands;
mod config;

use std::ffi::OsString;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use args::{Cli, ReportFormat};
use config::{Baseline, ConfigSnapshot, ExperimentConfig};

pub const REPORT_VERSION: u64 = 1;

pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 2;
    /// False claims and invalid or malformed certificates.
    pub const CLAIM_FALSE: u8 = 3;
    pub const REFUSED: u8 = 4;
    pub const NOT_FOUND: u8 = 5;
    pub const MISMATCH: u8 = 6;
    pub const VERSION_INCOMPATIBLE: u8 = 7;
    pub const INTERNAL: u8 = 11;
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub class: &'static str,
    pub message: String,
    pub detail: Option<Value>,
}

impl Failure {
    pub fn new(code: u8, class: &'static str, message: String) -> Self {
        Self {
            code,
            class,
            message,
            detail: None,
        }
    }

    pub fn usage(message: String) -> Self {
        Self::new(exit::USAGE, "usage", message)
    }

    pub fn refused(message: String) -> Self {
        Self::new(exit::REFUSED, "refused", message)
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }

    fn payload(&self) -> Value {
        let mut err = json!({ "class": self.class, "message": self.message });
        if let Some(d) = &self.detail {
            err["detail"] = d.clone();
        }
        json!({ "error": err })
    }
}

impl From<kolmo_core::Error> for Failure {
    fn from(e: kolmo_core::Error) -> Self {
        use kolmo_core::Error as E;
        let message = e.to_string();
        match e {
            E::Refused(_) => Failure::refused(message),
            E::ClaimFalse { witness } => Failure::new(exit::CLAIM_FALSE, "claim-false", message)
                .with_detail(json!({ "witness": witness.code })),
            E::NotFound(_) => Failure::new(exit::NOT_FOUND, "not-found", message),
            E::Divergence { .. } => Failure::new(exit::NOT_FOUND, "diverged", message),
            E::Domain(_) => Failure::new(exit::USAGE, "invalid-argument", message),
            E::Parse(_) => Failure::new(exit::CLAIM_FALSE, "malformed-certificate", message),
            E::Io(_) => Failure::new(exit::INTERNAL, "io", message),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(exit::INTERNAL, "io", e.to_string())
    }
}

/// A successful command: its results payload and how to print it as text.
pub struct Done {
    pub results: Value,
    pub text: String,
    pub exit: u8,
}

impl Done {
    pub fn new(results: Value) -> Self {
        let text = flatten_text(&results);
        Self {
            results,
            text,
            exit: exit::OK,
        }
    }

    pub fn with_text(results: Value, text: String) -> Self {
        Self {
            results,
            text,
            exit: exit::OK,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheCounts {
    pub hits: u64,
    pub misses: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub report_version: u64,
    pub command: Vec<String>,
    pub config: ConfigSnapshot,
    pub exit_status: u8,
    pub results: Value,
    pub timing_ms: u64,
    pub cache: CacheCounts,
}

pub enum Execution {
    /// Argument parsing stopped: usage error, or --help/--version.
    Clap(clap::Error),
    /// The configuration itself was rejected.
    Config(Failure),
    Ran {
        report: Box<Report>,
        format: ReportFormat,
        text: String,
        error: Option<String>,
    },
}

impl Execution {
    pub fn exit_status(&self) -> u8 {
        match self {
            Execution::Clap(e) => e.exit_code() as u8,
            Execution::Config(f) => f.code,
            Execution::Ran { report, .. } => report.exit_status,
        }
    }
}

/// Runs one command line. In a sandbox no files are written (used when
/// replaying a report).
pub fn execute(command: &[String], base: &Baseline, sandboxed: bool) -> Execution {
    let argv = std::iter::once("kolmo".to_string()).chain(command.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => return Execution::Clap(e),
    };
    let config = match ExperimentConfig::resolve(&cli, base) {
        Ok(c) => c,
        Err(f) => return Execution::Config(f),
    };
    let engine = config.engine();
    let ctx = commands::Context {
        config: &config,
        engine: &engine,
        sandboxed,
    };
    let started = Instant::now();
    let outcome = commands::run(&cli.command, &ctx);
    let timing_ms = started.elapsed().as_millis() as u64;
    let (exit_status, results, text, error) = match outcome {
        Ok(done) => (done.exit, done.results, done.text, None),
        Err(f) => {
            let msg = format!("error: {}", f.message);
            (f.code, f.payload(), String::new(), Some(msg))
        }
    };
    let stats = engine.cache_stats();
    Execution::Ran {
        report: Box::new(Report {
            report_version: REPORT_VERSION,
            command: command.to_vec(),
            config: config.snapshot(),
            exit_status,
            results,
            timing_ms,
            cache: CacheCounts {
                hits: stats.hits(),
                misses: stats.misses(),
            },
        }),
        format: config.report_format,
        text,
        error,
    }
}

/// `key: value` lines for a results object; nested keys are dotted.
pub fn flatten_text(v: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, v) in map {
                    let key = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&key, v, out);
                }
            }
            Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
                let parts: Vec<String> = items.iter().map(scalar).collect();
                out.push_str(&format!("{prefix}: {}\n", parts.join(" ")));
            }
            Value::Array(items) => {
                for (i, v) in items.iter().enumerate() {
                    walk(&format!("{prefix}.{i}"), v, out);
                }
            }
            _ => out.push_str(&format!("{prefix}: {}\n", scalar(v))),
        }
    }
    fn scalar(v: &Value) -> String {
        match v {
            Value::String(s) if s.is_empty() => "-".into(),
            Value::String(s) => s.clone(),
            Value::Null => "none".into(),
            other => other.to_string(),
        }
    }
    let mut out = String::new();
    walk("", v, &mut out);
    out
}

fn main() -> ExitCode {
    let command: Vec<String> = std::env::args_os()
        .skip(1)
        .map(|a: OsString| a.to_string_lossy().into_owned())
        .collect();
    let execution = match Baseline::from_env() {
        Ok(base) => execute(&command, &base, false),
        Err(f) => Execution::Config(f),
    };
    let status = execution.exit_status();
    match execution {
        Execution::Clap(e) => {
            let _ = e.print();
        }
        Execution::Config(f) => eprintln!("error: {}", f.message),
        Execution::Ran {
            report,
            format,
            text,
            error,
        } => {
            let mut stdout = std::io::stdout().lock();
            match format {
                ReportFormat::Json => {
                    let body = serde_json::to_string_pretty(&report).expect("report serializes");
                    let _ = writeln!(stdout, "{body}");
                }
                ReportFormat::Text => {
                    let _ = stdout.write_all(text.as_bytes());
                }
            }
            if let Some(e) = error {
                eprintln!("{e}");
            }
        }
    }
    ExitCode::from(status)
}

//! Command-line driver for the `dsseq` library and its verification suite.

pub mod args;
mod commands;
pub mod suite;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::Parser;
use dsseq::oracles::SearchBudget;
use serde_json::{json, Value};

use args::{Cli, GlobalOpts};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub format: Format,
    pub seed: u64,
    pub budget: SearchBudget,
    pub length_budget: u64,
    pub bits: u64,
    pub cache: Option<PathBuf>,
}

impl From<&GlobalOpts> for RunConfig {
    fn from(g: &GlobalOpts) -> Self {
        RunConfig {
            format: if g.text { Format::Text } else { Format::Json },
            seed: g.seed,
            budget: SearchBudget {
                max_length: g.max_length as usize,
                max_nodes: g.max_nodes,
                time_limit: Duration::from_secs(g.time_limit),
            },
            length_budget: g.length_budget,
            bits: g.bits,
            cache: g.cache.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A checked property does not hold.
    Failed,
    /// A search stopped before it could certify its answer.
    Incomplete,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::Incomplete => 3,
        }
    }
}

/// What a subcommand produced, in both renderings.
#[derive(Debug, Clone)]
pub struct Output {
    pub json: Value,
    pub text: String,
    pub status: Status,
}

impl Output {
    pub fn ok(json: Value, text: impl Into<String>) -> Self {
        Output {
            json,
            text: text.into(),
            status: Status::Ok,
        }
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{rendered}");
                2
            } else {
                let _ = write!(out, "{rendered}");
                0
            };
        }
    };
    let cfg = RunConfig::from(&cli.global);
    let result = commands::execute(&cli.command, &cfg);
    let written = match result {
        Ok(mut o) => {
            if let Value::Object(map) = &mut o.json {
                map.insert("seed".into(), json!(cfg.seed));
            }
            emit(out, &cfg, &o).map(|_| o.status.exit_code())
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            let code = exit_code(&e);
            match e.downcast_ref::<dsseq::Error>() {
                Some(dsseq::Error::BudgetExceeded { what, needed, budget }) => {
                    let o = Output {
                        json: json!({
                            "error": "budget exceeded",
                            "what": what,
                            "needed": needed.to_json(),
                            "budget": budget,
                            "seed": cfg.seed,
                        }),
                        text: format!("budget exceeded: {what} needs {needed}, budget is {budget}"),
                        status: Status::Incomplete,
                    };
                    emit(out, &cfg, &o).map(|_| code)
                }
                _ => Ok(code),
            }
        }
    };
    written.unwrap_or(2)
}

fn emit(out: &mut dyn Write, cfg: &RunConfig, o: &Output) -> std::io::Result<()> {
    match cfg.format {
        Format::Json => writeln!(out, "{}", o.json),
        Format::Text => writeln!(out, "{}", o.text.trim_end()),
    }
}

fn exit_code(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<dsseq::Error>() {
        Some(dsseq::Error::BudgetExceeded { .. }) => 3,
        Some(dsseq::Error::Internal(_)) => 1,
        _ => 2,
    }
}

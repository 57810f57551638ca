//! Command-line harness: dataset generation, optimization runs, method
//! benchmarks, bandwidth sweeps, field grid dumps and persistence diagrams.
//!
//! Failures print one line, `error[config]: ...` (exit code 2) or
//! `error[runtime]: ...` (exit code 1).

pub mod args;
mod commands;
pub mod config;

use std::ffi::OsString;

use clap::Parser;

use args::{Cli, Command};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Bad flags or config; exit code 2.
    Config(String),
    /// The command started but failed; exit code 1.
    Runtime(String),
}

impl CliError {
    /// Invalid arguments are configuration errors, anything else is a
    /// runtime failure.
    pub fn from_core(e: nwtopo::Error) -> Self {
        match e {
            nwtopo::Error::InvalidArgument(_) => CliError::Config(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    /// The single line printed to stderr.
    pub fn line(&self) -> String {
        let (tag, msg) = match self {
            CliError::Config(m) => ("config", m),
            CliError::Runtime(m) => ("runtime", m),
        };
        format!("error[{tag}]: {}", msg.split_whitespace().collect::<Vec<_>>().join(" "))
    }
}

pub fn execute(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Generate(a) => commands::generate(a),
        Command::Run(a) => commands::run(a),
        Command::Bench(a) => commands::bench(a),
        Command::SweepSigma(a) => commands::sweep_sigma(a),
        Command::Fields(a) => commands::fields(a),
        Command::Diagram(a) => commands::diagram_cmd(a),
    }
}

/// Parses `argv` and runs the command; returns the process exit code.
pub fn main_with<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or("invalid arguments").to_string();
            let first = first.trim_start_matches("error: ").to_string();
            eprintln!("{}", CliError::Config(first).line());
            return 2;
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.line());
            e.exit_code()
        }
    }
}

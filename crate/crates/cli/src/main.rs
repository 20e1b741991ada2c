mod commands;
mod config;
mod state;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{Args, RunConfig};

/// Invalid input: bad flags, ranges, or state files. Exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cfg = match RunConfig::from_args(Args::parse()) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let output = match commands::run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    for w in &output.warnings {
        eprintln!("{w}");
    }
    let written = match &cfg.output_path {
        Some(path) => std::fs::write(path, &output.text)
            .map_err(|e| format!("cannot write output to {}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(output.text.as_bytes())
            .map_err(|e| format!("cannot write to stdout: {e}")),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_USAGE);
    }
    if output.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

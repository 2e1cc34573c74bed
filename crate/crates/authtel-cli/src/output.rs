use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::CliError;

pub const SCHEMA: &str = "authtel-cli/1";

/// JSON envelope shared by every subcommand.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a C,
    pub seed: Option<u64>,
    pub formulas: Vec<String>,
    pub result: R,
}

pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?)),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out).map_err(|e| CliError::Io(e.to_string()))?;
    out.flush().map_err(|e| CliError::Io(e.to_string()))
}

/// Comment lines heading every CSV artifact.
pub fn csv_header<C: Serialize>(command: &str, config: &C, seed: Option<u64>, formulas: &[String]) -> Result<Vec<String>, CliError> {
    let mut lines = vec![
        format!("authtel {} {command}", authtel::VERSION),
        format!("config {}", serde_json::to_string(config)?),
    ];
    if let Some(s) = seed {
        lines.push(format!("seed {s}"));
    }
    if !formulas.is_empty() {
        lines.push(format!("formulas {}", formulas.join(" ")));
    }
    Ok(lines)
}

pub fn write_csv<T: Serialize>(path: Option<&Path>, comments: &[String], rows: &[T]) -> Result<(), CliError> {
    let mut out = sink(path)?;
    authtel::cert::write_sweep_csv(&mut out, comments, rows)?;
    out.flush().map_err(|e| CliError::Io(e.to_string()))
}

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::{Format, RunConfig};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration: exit 2.
    Config(String),
    /// Reading or writing files failed: exit 3.
    Io(String),
    /// `--assert` threshold violated: exit 4.
    Assert(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Assert(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Io(m) | CliError::Assert(m) => m,
        }
    }
}

impl From<semicircle_core::Error> for CliError {
    fn from(e: semicircle_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

/// Fields shared by every JSON report.
#[derive(Debug, Serialize)]
pub struct Header {
    pub command: &'static str,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
    pub config: RunConfig,
}

impl Header {
    pub fn new(command: &'static str, config: RunConfig, reproducible: bool) -> Self {
        let generated_at = if reproducible {
            None
        } else {
            SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
        };
        Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            generated_at,
            config,
        }
    }
}

/// A finished command: both renderings plus the threshold verdict.
pub struct Report {
    pub json: String,
    pub csv: String,
    /// `Some(message)` when the command's threshold is violated.
    pub violation: Option<String>,
}

impl Report {
    pub fn new<T: Serialize>(body: &T, csv: String, violation: Option<String>) -> Self {
        Self {
            json: serde_json::to_string_pretty(body).expect("reports serialize") + "\n",
            csv,
            violation,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.json.clone(),
            Format::Csv => self.csv.clone(),
        }
    }
}

pub fn write(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

/// CSV text with a header row; `None` cells are left empty.
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        let mut text = columns.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        let line: Vec<String> = cells.iter().map(Cell::render).collect();
        let _ = writeln!(self.text, "{}", line.join(","));
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => x.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Joins CSV tables as gnuplot data blocks (separated by two blank lines).
pub fn blocks(tables: Vec<String>) -> String {
    tables.join("\n\n")
}

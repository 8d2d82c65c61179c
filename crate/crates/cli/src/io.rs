use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use biham_core::qalg::{Matrix, MatrixJson};
use biham_core::Scalar;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Exit code 2 for bad input, 1 for failed computations.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<biham_core::Error> for CliError {
    fn from(e: biham_core::Error) -> Self {
        match e {
            biham_core::Error::Parse(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Inline JSON when the text starts with `{` or `[`, `-` for standard input,
/// otherwise a file path.
pub fn read_source(arg: &str) -> CliResult<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| CliError::Usage(format!("reading standard input: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(arg).map_err(|e| CliError::Usage(format!("reading {arg}: {e}")))
}

pub fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::Usage(format!("malformed {what}: {e}")))
}

pub fn matrix_arg<S: Scalar>(arg: &str, what: &str) -> CliResult<Matrix<S>> {
    let j: MatrixJson = parse_json(&read_source(arg)?, what)?;
    j.to_matrix().map_err(|e| CliError::Usage(format!("{what}: {e}")))
}

/// Writes to `path`, or standard output when absent or `-`.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, text).map_err(|e| CliError::Failed(format!("writing {}: {e}", p.display())))
        }
        _ => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Failed(format!("writing output: {e}")))
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Failed(format!("serialising report: {e}")))?;
    s.push('\n');
    Ok(s)
}

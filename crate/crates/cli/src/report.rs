use std::fmt;
use std::io::Write;
use std::path::Path;

use kronmle::numeric::{Field, Matrix};
use kronmle::Error;
use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Io(String),
    /// A check ran to completion and failed.
    Failed(String),
}

impl CliError {
    pub const FAILURE: u8 = 1;
    pub const DEGENERATE: u8 = 2;
    pub const MLE_NOT_EXISTS: u8 = 3;
    pub const USAGE: u8 = 4;

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::DegenerateData(_) | Error::SingularMatrix) => Self::DEGENERATE,
            CliError::Core(Error::MleNotExists(_)) => Self::MLE_NOT_EXISTS,
            CliError::Core(
                Error::RegimeViolation(_) | Error::WrongRegime(_) | Error::NonPositiveK(_),
            ) => Self::USAGE,
            CliError::Usage(_) => Self::USAGE,
            _ => Self::FAILURE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) | CliError::Io(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes to `path`, or to standard output when absent.
pub fn emit(path: Option<&Path>, contents: &str) -> CliResult {
    match path {
        Some(p) => {
            std::fs::write(p, contents).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn json<T: Serialize>(value: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn csv_rows<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn rows_of<T: Field>(m: &Matrix<T>) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|v| v.to_string()).collect())
        .collect()
}

pub fn indent_matrix<T: Field>(m: &Matrix<T>) -> String {
    rows_of(m)
        .iter()
        .map(|r| format!("  {}\n", r.join(" ")))
        .collect()
}

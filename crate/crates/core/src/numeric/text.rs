//! Shared matrix text format: a `rows cols` line followed by `rows` lines of
//! whitespace-separated entries. Rationals print as `p/q`, floats as decimal
//! literals (shortest round-trip form).

use std::fmt::Write as _;

use super::{Field, Matrix};
use crate::error::{Error, Result};

pub fn write_matrix<T: Field>(m: &Matrix<T>) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

/// Reads one matrix from a line iterator positioned at its header.
pub fn read_matrix_lines<'a, T: Field>(
    lines: &mut impl Iterator<Item = &'a str>,
) -> Result<Matrix<T>> {
    let mut lines = lines.filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("missing matrix header".into()))?;
    let dims = parse_usizes(header)?;
    let [rows, cols] = dims[..] else {
        return Err(Error::Parse(format!(
            "matrix header {header:?} needs `rows cols`"
        )));
    };
    let mut data = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("missing matrix row {}", r + 1)))?;
        let before = data.len();
        for tok in line.split_whitespace() {
            data.push(
                T::parse_entry(tok).ok_or_else(|| Error::Parse(format!("bad entry {tok:?}")))?,
            );
        }
        if data.len() - before != cols {
            return Err(Error::Parse(format!(
                "row {} has {} entries, expected {cols}",
                r + 1,
                data.len() - before
            )));
        }
    }
    Matrix::from_vec(rows, cols, data)
}

pub fn read_matrix<T: Field>(text: &str) -> Result<Matrix<T>> {
    read_matrix_lines(&mut text.lines())
}

pub(crate) fn parse_usizes(line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("expected a non-negative integer, got {t:?}")))
        })
        .collect()
}

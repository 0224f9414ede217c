//! Minimal CSV emission/ingestion for the pipeline's tables. Fields are
//! node labels (no commas or whitespace by construction of the input
//! format), integers, or floats fixed to 6 decimals.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;

use crate::Failure;

pub enum Cell<'a> {
    Str(&'a str),
    Int(i64),
    Float(f64),
}

impl From<usize> for Cell<'_> {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell<'_> {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl<'a> From<&'a str> for Cell<'a> {
    fn from(v: &'a str) -> Self {
        Cell::Str(v)
    }
}

pub struct CsvWriter {
    buf: String,
    columns: usize,
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = String::new();
        buf.push_str(&header.join(","));
        buf.push('\n');
        CsvWriter {
            buf,
            columns: header.len(),
        }
    }

    pub fn row<'a>(&mut self, cells: impl IntoIterator<Item = Cell<'a>>) {
        let mut count = 0;
        for (i, cell) in cells.into_iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            match cell {
                Cell::Str(s) => self.buf.push_str(s),
                Cell::Int(v) => {
                    let _ = write!(self.buf, "{v}");
                }
                Cell::Float(v) => {
                    let _ = write!(self.buf, "{v:.6}");
                }
            }
            count += 1;
        }
        debug_assert_eq!(count, self.columns, "row width must match the header");
        self.buf.push('\n');
    }

    pub fn write_to(&self, path: &Path) -> Result<(), Failure> {
        std::fs::write(path, &self.buf)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::Internal)
    }
}

/// Reads a CSV produced by [`CsvWriter`]: returns the header and the rows as
/// raw string fields. Missing files surface as missing artifacts.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), Failure> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Failure::MissingArtifact(path.to_path_buf()))
        }
        Err(e) => {
            return Err(Failure::Internal(anyhow::anyhow!(
                "reading {}: {e}",
                path.display()
            )))
        }
    };
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Failure::Input(anyhow::anyhow!("{} is empty", path.display())))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    Ok((header, rows))
}

pub fn parse_field<T: std::str::FromStr>(
    row: &[String],
    idx: usize,
    what: &str,
) -> Result<T, Failure> {
    row.get(idx)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Failure::Input(anyhow::anyhow!("bad {what} in row {row:?}")))
}

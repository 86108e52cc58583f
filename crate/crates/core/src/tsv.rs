//! Tab-separated helpers shared by the table formats.

use std::collections::HashMap;

use crate::{Error, Result};

pub(crate) fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .has_headers(true)
        .from_reader(text.as_bytes())
}

pub(crate) fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .delimiter(b'\t')
        .quote_style(csv::QuoteStyle::Never)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

pub(crate) fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("in-memory writer cannot fail");
    String::from_utf8(bytes).expect("writer only receives UTF-8")
}

/// Lower-cased, alphanumeric-only form so `caseID`, `case_id` and `CaseId`
/// all name the same column.
fn normalize(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

pub(crate) struct Columns {
    file: &'static str,
    index: HashMap<String, usize>,
}

impl Columns {
    pub(crate) fn new(file: &'static str, rdr: &mut csv::Reader<&[u8]>) -> Result<Self> {
        let headers = rdr.headers()?;
        let index = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (normalize(h), i))
            .collect();
        Ok(Self { file, index })
    }

    pub(crate) fn require(&self, column: &str) -> Result<usize> {
        self.index
            .get(&normalize(column))
            .copied()
            .ok_or_else(|| Error::MissingColumn {
                file: self.file,
                column: column.to_string(),
            })
    }
}

pub(crate) struct Row<'a> {
    pub(crate) file: &'static str,
    pub(crate) line: u64,
    pub(crate) record: &'a csv::StringRecord,
}

impl Row<'_> {
    pub(crate) fn get(&self, idx: usize, column: &str) -> Result<&str> {
        self.record.get(idx).ok_or_else(|| self.error(column, "missing field"))
    }

    pub(crate) fn parse<T: std::str::FromStr>(&self, idx: usize, column: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.get(idx, column)?;
        raw.trim()
            .parse()
            .map_err(|e: T::Err| self.error(column, format!("cannot parse {raw:?}: {e}")))
    }

    pub(crate) fn error(&self, column: &str, message: impl Into<String>) -> Error {
        Error::Row {
            file: self.file,
            line: self.line,
            column: column.to_string(),
            message: message.into(),
        }
    }
}

pub(crate) fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

/// Shortest representation that parses back to the same `f64`.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

pub(crate) fn split_set(field: &str) -> impl Iterator<Item = &str> {
    field.split(';').map(str::trim).filter(|s| !s.is_empty())
}

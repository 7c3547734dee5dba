use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::Format;
use crate::error::{Error, Result};

/// Named numeric columns plus a string metadata block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub metadata: BTreeMap<String, String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        ResultTable { metadata: BTreeMap::new(), columns: columns.into_iter().map(Into::into).collect(), rows: vec![] }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }

    /// Panics on a row whose width differs from the header.
    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the column count");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// Float formatting with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

pub fn emit_csv(t: &ResultTable) -> String {
    let mut out = String::new();
    for (k, v) in &t.metadata {
        // Keep each entry on one comment line.
        let v = v.replace('\n', " ");
        let _ = writeln!(out, "# {k}: {v}");
    }
    let _ = writeln!(out, "{}", t.columns.join(","));
    for row in &t.rows {
        let cells: Vec<String> = row.iter().map(|x| format_float(*x)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// Reads back what [`emit_csv`] writes.
pub fn parse_csv(text: &str) -> Result<ResultTable> {
    let bad = |m: String| Error::InvalidInput(format!("result CSV: {m}"));
    let mut metadata = BTreeMap::new();
    let mut lines = text.lines();
    let header = loop {
        match lines.next() {
            Some(l) if l.starts_with('#') => {
                let body = l.trim_start_matches('#').trim_start();
                let (k, v) = body.split_once(": ").ok_or_else(|| bad(format!("malformed metadata `{l}`")))?;
                metadata.insert(k.to_string(), v.to_string());
            }
            Some(l) => break l,
            None => return Err(bad("missing header".into())),
        }
    };
    let columns: Vec<String> = header.split(',').map(str::to_string).collect();
    let mut rows = vec![];
    for l in lines.filter(|l| !l.trim().is_empty()) {
        let row: std::result::Result<Vec<f64>, _> = l.split(',').map(|c| c.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| bad(format!("{e} in `{l}`")))?;
        if row.len() != columns.len() {
            return Err(bad(format!("row width {} but {} columns", row.len(), columns.len())));
        }
        rows.push(row);
    }
    Ok(ResultTable { metadata, columns, rows })
}

pub fn emit_json(t: &ResultTable) -> String {
    // Non-finite numbers have no JSON form; they become null.
    let mut s = serde_json::to_string_pretty(t).expect("table serializes");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> Result<ResultTable> {
    #[derive(Deserialize)]
    struct Raw {
        metadata: BTreeMap<String, String>,
        columns: Vec<String>,
        rows: Vec<Vec<Option<f64>>>,
    }
    let raw: Raw = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("result JSON: {e}")))?;
    let rows: Vec<Vec<f64>> =
        raw.rows.into_iter().map(|r| r.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect()).collect();
    if let Some(r) = rows.iter().find(|r| r.len() != raw.columns.len()) {
        return Err(Error::InvalidInput(format!(
            "result JSON: row width {} but {} columns",
            r.len(),
            raw.columns.len()
        )));
    }
    Ok(ResultTable { metadata: raw.metadata, columns: raw.columns, rows })
}

pub fn emit(t: &ResultTable, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => emit_csv(t),
        Format::Json => emit_json(t),
    }
    .into_bytes()
}

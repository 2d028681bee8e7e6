//! Design CSV files, numeric lists and JSON output.
//!
//! Design CSV: no header, one row per observation, values printed with the
//! shortest representation that parses back to the same f64.

use std::fs;
use std::io::Write;
use std::path::Path;

use lassolab_core::{DesignMatrix, NormPolicy};
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

/// Version tag written into every JSON document.
pub const SCHEMA: u64 = 1;

pub fn read_design(path: &Path, policy: NormPolicy) -> Result<DesignMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|source| CliError::Csv { path: path.into(), source })?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|source| CliError::Csv { path: path.into(), source })?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|e| CliError::Parse(format!("{}: bad number {f:?}: {e}", path.display()))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(DesignMatrix::from_rows(&rows, policy)?)
}

pub fn design_csv(design: &DesignMatrix) -> Vec<u8> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for i in 0..design.n() {
        let row: Vec<String> = design.row(i).iter().map(|v| v.to_string()).collect();
        wtr.write_record(&row).expect("writing to memory");
    }
    wtr.into_inner().expect("writing to memory")
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.into(), source })
}

/// Comma-separated numbers, e.g. "1,0.5,-2".
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| CliError::Usage(format!("bad number {t:?}: {e}"))))
        .collect()
}

/// Comma-separated 1-based indices, returned 0-based.
pub fn parse_support(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<usize>() {
            Ok(0) => Err(CliError::Usage("indices in S are 1-based".into())),
            Ok(j) => Ok(j - 1),
            Err(e) => Err(CliError::Usage(format!("bad index {t:?}: {e}"))),
        })
        .collect()
}

/// Numbers separated by commas, whitespace or newlines.
pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|e| CliError::Parse(format!("{}: bad number {t:?}: {e}", path.display()))))
        .collect()
}

/// `value` serialised as an object with `"schema": 1` added.
pub fn with_schema<T: Serialize>(value: &T) -> Result<Value> {
    let mut v = serde_json::to_value(value).map_err(|source| CliError::Json { context: "serialising output".into(), source })?;
    match &mut v {
        Value::Object(map) => {
            map.insert("schema".into(), Value::from(SCHEMA));
        }
        other => {
            let inner = other.take();
            let mut map = serde_json::Map::new();
            map.insert("schema".into(), Value::from(SCHEMA));
            map.insert("value".into(), inner);
            v = Value::Object(map);
        }
    }
    Ok(v)
}

pub fn json_bytes(value: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("Value always serialises");
    out.push(b'\n');
    out
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => write_bytes(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

/// Plot-ready CSV with a header row.
pub fn table_csv(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(header).expect("writing to memory");
    for r in rows {
        wtr.write_record(r).expect("writing to memory");
    }
    wtr.into_inner().expect("writing to memory")
}

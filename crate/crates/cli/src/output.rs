//! Artifact writing: `report.json`, `rows.csv`, `plotdata.csv` and any extra files.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use rigid_core::experiments::PlotPoint;

use crate::error::CliError;

pub struct Artifacts {
    pub summary: Value,
    pub rows: Vec<u8>,
    pub plot: Vec<PlotPoint>,
    pub extra: Vec<(String, String)>,
}

/// Serialize flat records to CSV with a header row.
pub fn table<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

/// CSV from an explicit header and string records.
pub fn raw_table(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

/// Long-format `series,x,y,yerr`; header only when there are no points.
pub fn plotdata(points: &[PlotPoint]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(["series", "x", "y", "yerr"])?;
    for p in points {
        w.serialize(p)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

/// Drop bulky per-replica arrays from a serialized report.
pub fn summarize<T: Serialize>(report: &T) -> Value {
    let mut v = serde_json::to_value(report).expect("reports serialize");
    strip(&mut v);
    v
}

fn strip(v: &mut Value) {
    if let Value::Object(m) = v {
        m.remove("rows");
        m.remove("samples");
        for child in m.values_mut() {
            strip(child);
        }
    }
}

pub fn write_all(dir: &Path, report: &Value, art: &Artifacts) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    fs::write(dir.join("report.json"), text)?;
    fs::write(dir.join("rows.csv"), &art.rows)?;
    fs::write(dir.join("plotdata.csv"), plotdata(&art.plot)?)?;
    for (name, body) in &art.extra {
        fs::write(dir.join(name), body)?;
    }
    Ok(())
}

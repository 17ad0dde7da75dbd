use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::{Failure, Format};

/// Shortest round-trip decimal; scientific notation outside [1e-4, 1e16).
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn open(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Data(format!("cannot write {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// A CSV table with optional `# key=value` preamble lines.
pub struct Table {
    preamble: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { preamble: Vec::new(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn note(&mut self, key: &str, value: impl Into<String>) {
        self.preamble.push((key.to_owned(), value.into()));
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.header.len());
        self.rows.push(cells);
    }

    pub fn write(&self, out: &mut dyn Write) -> Result<(), Failure> {
        for (k, v) in &self.preamble {
            writeln!(out, "# {k}={v}").map_err(io_failure)?;
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header).map_err(csv_failure)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_failure)?;
        }
        w.flush().map_err(io_failure)
    }

    /// `{"meta": {..}, "rows": [{column: value}, ..]}`; numeric cells become
    /// JSON numbers and non-finite ones `null`.
    pub fn write_json(&self, out: &mut dyn Write) -> Result<(), Failure> {
        let meta: Map<String, Value> = self.preamble.iter().map(|(k, v)| (k.clone(), cell(v))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.header.iter().cloned().zip(r.iter().map(|c| cell(c))).collect()))
            .collect();
        let mut doc = Map::new();
        doc.insert("meta".into(), Value::Object(meta));
        doc.insert("rows".into(), Value::Array(rows));
        write_json(&doc, out)
    }

    pub fn emit(&self, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
        match format {
            Format::Csv => self.write(out),
            Format::Json => self.write_json(out),
        }
    }
}

fn cell(text: &str) -> Value {
    match text.parse::<f64>() {
        Ok(x) if x.is_finite() => Value::from(x),
        Ok(_) => Value::Null,
        Err(_) => Value::from(text),
    }
}

pub fn write_json<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Failure::Data(e.to_string()))?;
    writeln!(out).map_err(io_failure)?;
    out.flush().map_err(io_failure)
}

fn io_failure(e: io::Error) -> Failure {
    Failure::Data(format!("write failed: {e}"))
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure::Data(format!("write failed: {e}"))
}

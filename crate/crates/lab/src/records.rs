//! Result records and series, and their JSON-lines / CSV encodings.

use std::io::{self, Write};

use serde::Serialize;

/// Where a record's reference value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Provenance {
    /// A value quoted from the underlying theory.
    Paper,
    /// Holds by construction or by definition.
    Trivial,
    /// Computed by an independent oracle.
    Derived,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Paper => "PAPER",
            Provenance::Trivial => "TRIVIAL",
            Provenance::Derived => "DERIVED",
        }
    }
}

/// One checked quantity. `pass` holds exactly when `residual ≤ tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub provenance: Provenance,
    pub oracle: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<f64>,
}

impl ResultRecord {
    pub fn new(
        name: impl Into<String>,
        value: f64,
        reference: f64,
        provenance: Provenance,
        oracle: impl Into<String>,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        ResultRecord {
            name: name.into(),
            value,
            reference,
            provenance,
            oracle: oracle.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            error: None,
            runtime_ms: None,
        }
    }

    /// `|value − reference|` as the residual.
    pub fn compare(
        name: impl Into<String>,
        value: f64,
        reference: f64,
        provenance: Provenance,
        oracle: impl Into<String>,
        tolerance: f64,
    ) -> Self {
        Self::new(name, value, reference, provenance, oracle, (value - reference).abs(), tolerance)
    }

    /// A check that could not be evaluated; always failing.
    pub fn failed(name: impl Into<String>, provenance: Provenance, oracle: impl Into<String>, error: String) -> Self {
        let mut r = Self::new(name, f64::NAN, f64::NAN, provenance, oracle, f64::INFINITY, 0.0);
        r.pass = false;
        r.error = Some(error);
        r
    }
}

/// Shortest round-trip text for a float; scientific outside `[1e-4, 1e15)`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn sort_records(records: &mut [ResultRecord]) {
    records.sort_by(|a, b| a.name.cmp(&b.name));
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Json => "jsonl",
            Format::Csv => "csv",
        }
    }
}

pub const RECORD_COLUMNS: [&str; 10] =
    ["name", "value", "reference", "provenance", "oracle", "residual", "tolerance", "pass", "error", "runtime_ms"];

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

pub fn write_records<W: Write>(records: &[ResultRecord], format: Format, mut out: W) -> io::Result<()> {
    match format {
        Format::Json => {
            for r in records {
                serde_json::to_writer(&mut out, r)?;
                out.write_all(b"\n")?;
            }
            out.flush()
        }
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(RECORD_COLUMNS)?;
            for r in records {
                w.write_record([
                    r.name.clone(),
                    format_float(r.value),
                    format_float(r.reference),
                    r.provenance.as_str().to_string(),
                    r.oracle.clone(),
                    format_float(r.residual),
                    format_float(r.tolerance),
                    r.pass.to_string(),
                    r.error.clone().unwrap_or_default(),
                    r.runtime_ms.map(format_float).unwrap_or_default(),
                ])?;
            }
            w.flush()
        }
    }
}

/// A table of plot data, written as `<name>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Series {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Series { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, out: W) -> io::Result<()> {
        let mut w = csv_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()
    }
}

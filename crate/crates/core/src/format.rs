//! Tables and number formatting for CLI output.
//!
//! Numbers are written in shortest round-trip decimal, switching to
//! exponent notation outside `[1e-5, 1e16)`. CSV output has a header row,
//! comma separators and LF line endings.

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Serialize, Serializer};

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::h3::H3EntropyRecord;
use crate::spectral::EntropyTrace;

pub const H3_COLUMNS: [&str; 14] = [
    "t",
    "entropy",
    "I1",
    "I2",
    "rate_direct",
    "rate_fd",
    "eta",
    "eta_lower",
    "eta_upper",
    "etap",
    "etap_lower",
    "etap_upper",
    "band_lo",
    "band_hi",
];

pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Named numeric columns. Serializes as an array of records in column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidParameter(format!(
                "row has {} values for {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        // writing to a Vec cannot fail
        w.write_record(&self.columns).expect("in-memory csv");
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| format_number(x)))
                .expect("in-memory csv");
        }
        let bytes = w.into_inner().expect("in-memory csv");
        String::from_utf8(bytes).expect("csv output is ascii")
    }
}

struct Record<'a> {
    columns: &'a [String],
    values: &'a [f64],
}

impl Serialize for Record<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.columns.len()))?;
        for (c, v) in self.columns.iter().zip(self.values) {
            map.serialize_entry(c, v)?;
        }
        map.end()
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows.len()))?;
        for row in &self.rows {
            seq.serialize_element(&Record {
                columns: &self.columns,
                values: row,
            })?;
        }
        seq.end()
    }
}

pub fn h3_table(records: &[H3EntropyRecord]) -> Table {
    let mut table = Table::new(&H3_COLUMNS);
    for r in records {
        table.rows.push(vec![
            r.t,
            r.entropy,
            r.i1,
            r.i2,
            r.rate_direct,
            r.rate_fd,
            r.eta.value(),
            r.eta_envelope.lower.value(),
            r.eta_envelope.upper.value(),
            r.eta_prime.value(),
            r.eta_prime_envelope.lower.value(),
            r.eta_prime_envelope.upper.value(),
            r.band_lo,
            r.band_hi,
        ]);
    }
    table
}

/// Trace columns followed by one `rhs_<bound>` column per report.
pub fn trace_table(trace: &EntropyTrace, reports: &[BoundReport]) -> Table {
    let mut columns: Vec<String> = ["t", "entropy", "rate_direct", "rate_fd", "fisher"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    columns.extend(reports.iter().map(|r| format!("rhs_{}", r.bound_name)));
    let mut table = Table::new(&columns);
    for i in 0..trace.times.len() {
        let mut row = vec![
            trace.times[i],
            trace.entropy[i],
            trace.rate_direct[i],
            trace.rate_fd[i],
            trace.fisher[i],
        ];
        row.extend(reports.iter().map(|r| r.rhs[i]));
        table.rows.push(row);
    }
    table
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidParameter(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

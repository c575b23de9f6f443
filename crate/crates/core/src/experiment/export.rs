//! Field export for plotting: CSV or JSON rows `x1, x2, eu1, eu2, re, im`.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticePoint;

pub const CSV_HEADER: [&str; 6] = ["x1", "x2", "eu1", "eu2", "re", "im"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldRow {
    pub x1: i64,
    pub x2: i64,
    pub eu1: f64,
    pub eu2: f64,
    pub re: f64,
    pub im: f64,
}

impl FieldRow {
    pub fn new(p: LatticePoint, value: Complex64) -> FieldRow {
        let (eu1, eu2) = p.to_euclidean();
        FieldRow {
            x1: p.x1,
            x2: p.x2,
            eu1,
            eu2,
            re: value.re,
            im: value.im,
        }
    }

    pub fn point(&self) -> LatticePoint {
        LatticePoint::new(self.x1, self.x2)
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::InvalidArgument(format!("unknown export format {other:?}"))),
        }
    }
}

/// Shortest digits that read back to `v`: plain notation for moderate
/// magnitudes, exponent notation otherwise.
pub fn format_float(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Rows kept sorted by `x2`, then `x1`; one row per point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FieldExport {
    rows: Vec<FieldRow>,
}

impl FieldExport {
    /// Sorts the rows; a repeated point is an error.
    pub fn new(mut rows: Vec<FieldRow>) -> Result<FieldExport> {
        rows.sort_by_key(|r| (r.x2, r.x1));
        if let Some(w) = rows.windows(2).find(|w| (w[0].x1, w[0].x2) == (w[1].x1, w[1].x2)) {
            return Err(Error::InvalidArgument(format!(
                "point ({}, {}) exported twice",
                w[0].x1, w[0].x2
            )));
        }
        Ok(FieldExport { rows })
    }

    pub fn from_values<I>(values: I) -> Result<FieldExport>
    where
        I: IntoIterator<Item = (LatticePoint, Complex64)>,
    {
        FieldExport::new(values.into_iter().map(|(p, v)| FieldRow::new(p, v)).collect())
    }

    pub fn rows(&self) -> &[FieldRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, p: LatticePoint) -> Option<Complex64> {
        self.rows
            .binary_search_by_key(&(p.x2, p.x1), |r| (r.x2, r.x1))
            .ok()
            .map(|i| self.rows[i].value())
    }

    /// CSV with LF line endings; floats use the shortest representation
    /// that reads back to the same value.
    pub fn write_csv<W: Write>(&self, out: W) -> std::result::Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.x1.to_string(),
                r.x2.to_string(),
                format_float(r.eu1),
                format_float(r.eu2),
                format_float(r.re),
                format_float(r.im),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn from_csv_str(text: &str, origin: &Path) -> Result<FieldExport> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| Error::format(origin, e))?.clone();
        if header.iter().ne(CSV_HEADER) {
            return Err(Error::format(origin, format!("unexpected header {header:?}")));
        }
        let mut rows = Vec::new();
        for record in reader.deserialize::<FieldRow>() {
            rows.push(record.map_err(|e| Error::format(origin, e))?);
        }
        FieldExport::new(rows)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.rows).expect("plain data serializes")
    }

    pub fn from_json_str(text: &str, origin: &Path) -> Result<FieldExport> {
        let rows: Vec<FieldRow> = serde_json::from_str(text).map_err(|e| Error::format(origin, e))?;
        FieldExport::new(rows)
    }

    pub fn write(&self, path: &Path, format: ExportFormat) -> Result<()> {
        let text = match format {
            ExportFormat::Csv => self.to_csv_string(),
            ExportFormat::Json => self.to_json_string(),
        };
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path, format: ExportFormat) -> Result<FieldExport> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        match format {
            ExportFormat::Csv => FieldExport::from_csv_str(&text, path),
            ExportFormat::Json => FieldExport::from_json_str(&text, path),
        }
    }
}

/// Free-function form of [`FieldExport::write`].
pub fn export_field(field: &FieldExport, path: &Path, format: ExportFormat) -> Result<()> {
    field.write(path, format)
}

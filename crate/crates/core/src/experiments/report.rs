use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::elliptic::{CoordSpec, PointSpec};
use crate::error::{Error, Result};
use crate::heights::HeightValue;

use super::config::{ExperimentConfig, CONFIG_SCHEMA};

/// How a reported number was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    /// Integer or rational computed exactly.
    Exact,
    /// Floating value with a certified error bound.
    Enclosed,
    /// Function of exact or enclosed inputs, rounded in double precision.
    Derived,
}

/// A number together with its error bound and provenance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub error: f64,
    pub provenance: Provenance,
}

impl Measured {
    pub fn exact(value: f64) -> Self {
        Measured { value, error: 0.0, provenance: Provenance::Exact }
    }

    pub fn derived(value: f64) -> Self {
        Measured { value, error: value.abs() * 1e-14, provenance: Provenance::Derived }
    }

    pub fn height(h: &HeightValue) -> Self {
        if h.exact_zero {
            Measured::exact(0.0)
        } else {
            Measured { value: h.value, error: h.error, provenance: Provenance::Enclosed }
        }
    }

    /// Quotient with first-order error propagation.
    pub fn ratio(&self, den: &Measured) -> Option<Measured> {
        if den.value.abs() <= den.error {
            return None;
        }
        let value = self.value / den.value;
        let rel = self.error / self.value.abs().max(f64::MIN_POSITIVE) + den.error / (den.value.abs() - den.error);
        let provenance = match (self.provenance, den.provenance) {
            (Provenance::Exact, Provenance::Exact) => Provenance::Derived,
            (Provenance::Enclosed, _) | (_, Provenance::Enclosed) => Provenance::Enclosed,
            _ => Provenance::Derived,
        };
        Some(Measured { value, error: value.abs() * rel + value.abs() * 1e-15, provenance })
    }
}

/// Metadata embedded in every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool: String,
    pub version: String,
    pub schema: u32,
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub precision_bits: u32,
}

impl ReportMeta {
    pub fn new(command: &str, cfg: &ExperimentConfig) -> Self {
        ReportMeta {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            schema: CONFIG_SCHEMA,
            command: command.to_string(),
            config_sha256: cfg.hash(),
            seed: cfg.seed,
            precision_bits: cfg.precision_bits(),
        }
    }
}

/// Rows of plain text cells plus the provenance of each column.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<(String, Provenance)>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[(&str, Provenance)]) -> Self {
        Table { columns: columns.iter().map(|(c, p)| (c.to_string(), *p)).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns.iter().map(|(c, _)| c)).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    pub fn provenance(&self) -> BTreeMap<String, Provenance> {
        self.columns.iter().cloned().collect()
    }
}

/// A report body that can be written as JSON or as a CSV table.
pub trait Tabular: Serialize {
    fn table(&self) -> Table;
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Config(format!("unknown format {s:?} (expected json or csv)"))),
        }
    }
}

#[derive(Serialize)]
struct JsonEnvelope<'a, T: Serialize> {
    meta: &'a ReportMeta,
    report: &'a T,
}

#[derive(Serialize)]
struct CsvSidecar<'a> {
    meta: &'a ReportMeta,
    csv: String,
    columns: BTreeMap<String, Provenance>,
}

/// Full JSON text: metadata plus the report body.
pub fn to_json<T: Serialize>(meta: &ReportMeta, body: &T) -> String {
    serde_json::to_string_pretty(&JsonEnvelope { meta, report: body }).expect("report serializes") + "\n"
}

/// Writes `<stem>.json`, or `<stem>.csv` with a `<stem>.meta.json` sidecar.
/// CSV bodies carry no metadata, so equal inputs give equal bytes.
pub fn write_report<T: Tabular>(dir: &Path, stem: &str, meta: &ReportMeta, body: &T, format: Format) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let write = |path: PathBuf, text: &str| -> Result<PathBuf> {
        std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    };
    match format {
        Format::Json => Ok(vec![write(dir.join(format!("{stem}.json")), &to_json(meta, body))?]),
        Format::Csv => {
            let table = body.table();
            let csv_name = format!("{stem}.csv");
            let side = CsvSidecar { meta, csv: csv_name.clone(), columns: table.provenance() };
            let side_text = serde_json::to_string_pretty(&side).expect("sidecar serializes") + "\n";
            Ok(vec![
                write(dir.join(&csv_name), &table.to_csv())?,
                write(dir.join(format!("{stem}.meta.json")), &side_text)?,
            ])
        }
    }
}

pub fn coord_cell(c: &CoordSpec) -> String {
    match c {
        CoordSpec::Int(n) => n.to_string(),
        CoordSpec::Str(s) => s.clone(),
        CoordSpec::List(v) => format!("[{}]", v.join(",")),
    }
}

pub fn point_cell(p: &PointSpec) -> String {
    match p {
        PointSpec::Infinity(s) => s.clone(),
        PointSpec::Affine([x, y]) => format!("({},{})", coord_cell(x), coord_cell(y)),
    }
}

/// Fixed-width float text so CSV bytes do not depend on shortest-repr quirks.
pub fn float_cell(x: f64) -> String {
    format!("{x:.12e}")
}

pub fn opt_cell<T>(x: Option<T>, f: impl Fn(T) -> String) -> String {
    x.map(f).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_cells_with_commas() {
        let mut t = Table::new(&[("point", Provenance::Exact), ("h", Provenance::Enclosed)]);
        let p = PointSpec::Affine([CoordSpec::Int(3), CoordSpec::List(vec!["1/2".into(), "3".into()])]);
        t.push(vec![point_cell(&p), float_cell(0.5)]);
        assert_eq!(t.to_csv(), "point,h\n\"(3,[1/2,3])\",5.000000000000e-1\n");
    }

    #[test]
    fn ratio_propagates_error() {
        let a = Measured { value: 2.0, error: 0.01, provenance: Provenance::Enclosed };
        let r = a.ratio(&Measured::exact(4.0)).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15 && (r.error - 0.0025).abs() < 1e-9);
        assert_eq!(r.provenance, Provenance::Enclosed);
        assert!(a.ratio(&Measured::exact(0.0)).is_none());
    }
}

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{ReplicabilityReport, SweepTable};

/// Column order of the per-run CSV.
pub const CSV_COLUMNS: [&str; 15] = [
    "trial",
    "algo",
    "epsilon",
    "delta",
    "rho",
    "nu",
    "theta",
    "labels_used",
    "unlabeled_used",
    "rounds",
    "err_final",
    "signature_hash",
    "b_seed",
    "data_seed",
    "agreed",
];

/// One run of a paired trial. Fields of a failed run are left empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub algo: String,
    pub epsilon: f64,
    pub delta: f64,
    pub rho: Option<f64>,
    pub nu: f64,
    pub theta: Option<f64>,
    pub labels_used: Option<u64>,
    pub unlabeled_used: Option<u64>,
    pub rounds: Option<u64>,
    pub err_final: Option<f64>,
    pub signature_hash: String,
    pub b_seed: String,
    pub data_seed: String,
    pub agreed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Input(format!("unknown format `{s}`"))),
        }
    }
}

/// Something that can be written as CSV or JSON.
pub trait Exportable: Serialize {
    fn to_csv(&self) -> Result<String>;

    fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json().map(|mut s| {
                s.push('\n');
                s
            }),
        }
    }
}

fn csv_text<T: Serialize>(header: &[&str], rows: &[T]) -> Result<String> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

impl Exportable for ReplicabilityReport {
    fn to_csv(&self) -> Result<String> {
        csv_text(&CSV_COLUMNS, &self.records)
    }
}

impl Exportable for SweepTable {
    fn to_csv(&self) -> Result<String> {
        csv_text(&super::sweep::SWEEP_COLUMNS, &self.rows)
    }
}

/// Writes `item` to `path`, creating parent directories.
pub fn export<T: Exportable>(item: &T, path: &Path, format: Format) -> Result<()> {
    let text = item.render(format)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

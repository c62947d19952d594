//! CSV and JSON serialization of spectra and sweeps.
//!
//! CSV rows are `phi,total_mz,level_index,energy`, sorted by `(phi, energy)`,
//! with every float printed to 12 significant digits. JSON documents carry
//! the same records at full precision plus run metadata.

use std::io::{self, Write};

use jcxy_core::eigensolve::DegeneracySummary;
use jcxy_core::{HalfInt, Spectrum, SweepResult};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "phi,total_mz,level_index,energy";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub phi: f64,
    pub total_mz: f64,
    pub level_index: usize,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub n_sites: usize,
    pub topology: String,
    pub jc_site: usize,
    pub tolerance: f64,
    /// `|total_mz|` of the selected sector pair, if any.
    pub sector_filter: Option<f64>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyRecord {
    pub distinct_count: usize,
    pub levels: Vec<LevelRecord>,
}

impl From<&DegeneracySummary> for DegeneracyRecord {
    fn from(summary: &DegeneracySummary) -> Self {
        DegeneracyRecord {
            distinct_count: summary.distinct_count,
            levels: summary
                .levels
                .iter()
                .map(|l| LevelRecord {
                    value: l.value,
                    multiplicity: l.multiplicity,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub schema_version: u32,
    /// `"spectrum"` or `"sweep"`.
    pub kind: String,
    pub metadata: Metadata,
    pub records: Vec<Record>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degeneracy: Option<DegeneracyRecord>,
}

fn total_mz_of(inv: HalfInt) -> f64 {
    (inv - HalfInt::HALF).as_f64()
}

pub fn spectrum_records(phi: f64, spectrum: &Spectrum) -> Vec<Record> {
    spectrum
        .pairs()
        .enumerate()
        .map(|(level_index, (energy, inv))| Record {
            phi,
            total_mz: total_mz_of(inv),
            level_index,
            energy,
        })
        .collect()
}

pub fn sweep_records(result: &SweepResult) -> Vec<Record> {
    result
        .grid
        .values()
        .iter()
        .zip(&result.spectra)
        .flat_map(|(&phi, spectrum)| spectrum_records(phi, spectrum))
        .collect()
}

pub fn sweep_metadata(result: &SweepResult) -> Metadata {
    Metadata {
        n_sites: result.meta.n_sites,
        topology: result.meta.topology.to_string(),
        jc_site: result.meta.jc_site,
        tolerance: result.meta.tolerance,
        sector_filter: result.meta.sector_filter.map(HalfInt::as_f64),
        points: result.grid.len(),
    }
}

/// Formats like C's `%.12g`, always with `.` as decimal separator; `-0` prints as `0`.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    const DIGITS: i32 = 12;
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exponent) = sci.split_once('e').expect("scientific format");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exponent) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exponent < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exponent.abs())
    } else {
        let decimals = (DIGITS - 1 - exponent).max(0) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(mut out: W, records: &[Record]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{}",
            format_sig12(r.phi),
            format_sig12(r.total_mz),
            r.level_index,
            format_sig12(r.energy)
        )?;
    }
    Ok(())
}

pub fn write_json<W: Write>(mut out: W, document: &Document) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, document)?;
    writeln!(out)
}

pub fn parse_json(text: &str) -> serde_json::Result<Document> {
    serde_json::from_str(text)
}

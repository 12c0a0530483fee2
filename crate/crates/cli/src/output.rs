use std::fs;
use std::path::{Path, PathBuf};

use laddertangle_core::config::ConfigDocument;
use laddertangle_core::experiments::{PumpSweepTable, Sweep};
use laddertangle_core::fluctuations::SpectrumTable;
use laddertangle_core::model::{RegimeWarning, SystemParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const SPECTRUM_HEADER: [&str; 5] = ["delta1_mhz", "v12", "du2", "dv2", "absorption"];

/// 17 significant digits, enough to round-trip every f64.
pub fn format_number(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("in-memory writer cannot fail")
}

pub fn spectrum_csv(table: &SpectrumTable) -> Vec<u8> {
    let mut w = writer();
    w.write_record(SPECTRUM_HEADER).expect("in-memory write");
    for r in &table.rows {
        w.write_record([r.axis, r.v12, r.du2, r.dv2, r.absorption].map(format_number))
            .expect("in-memory write");
    }
    finish(w)
}

/// Label of a collision rate in column names: `0`, `0.5`, `20`.
fn rate_label(p: f64) -> String {
    format!("p{p}")
}

pub fn pump_sweep_header(rates: &[f64]) -> Vec<String> {
    let mut header = vec!["alpha2".to_string()];
    header.extend(rates.iter().map(|&p| format!("v12_{}", rate_label(p))));
    header.extend(rates.iter().map(|&p| format!("absorption_{}", rate_label(p))));
    header
}

pub fn pump_sweep_csv(table: &PumpSweepTable) -> Vec<u8> {
    let mut w = writer();
    w.write_record(pump_sweep_header(&table.collision_rates))
        .expect("in-memory write");
    for r in &table.rows {
        let record = std::iter::once(r.alpha2)
            .chain(r.v12.iter().copied())
            .chain(r.absorption.iter().copied())
            .map(format_number);
        w.write_record(record).expect("in-memory write");
    }
    finish(w)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
    pub rows: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub scenario: String,
    /// Document that reproduces the run.
    pub config: ConfigDocument,
    pub resolved_params: SystemParams,
    pub sweep: Sweep,
    pub nodes: usize,
    /// Largest number of velocity classes used at any grid point.
    pub max_velocity_classes: usize,
    pub jobs: usize,
    pub wall_time_s: f64,
    pub warnings: Vec<String>,
    pub outputs: Vec<OutputFile>,
}

impl RunManifest {
    pub fn warnings_of(list: &[RegimeWarning]) -> Vec<String> {
        list.iter().map(ToString::to_string).collect()
    }
}

pub fn manifest_path(dir: &Path, scenario: &str) -> PathBuf {
    dir.join(format!("{scenario}.manifest.json"))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

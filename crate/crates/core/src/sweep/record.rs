//! Benchmark records, the append-only journal, and the CSV/JSON emitters.
//!
//! The journal (`records.jsonl`) is the crash-safe resume store and keeps
//! measured wall times. The canonical artifact (`records.json`) drops wall
//! time so that identical sweep configurations produce byte-identical bytes
//! across machines and runs.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SweepConfig;
use crate::error::{Error, Result};
use crate::seeding::job_seed;

/// Ground-state method under benchmark.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Ed,
    Rbm,
    RbmSymmetric,
    Dmrg,
    Vqe,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Ed => "ed",
            Method::Rbm => "rbm",
            Method::RbmSymmetric => "rbm_symmetric",
            Method::Dmrg => "dmrg",
            Method::Vqe => "vqe",
        }
    }

    pub fn all() -> [Method; 5] {
        [
            Method::Ed,
            Method::Rbm,
            Method::RbmSymmetric,
            Method::Dmrg,
            Method::Vqe,
        ]
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ed" => Ok(Method::Ed),
            "rbm" => Ok(Method::Rbm),
            "rbm_symmetric" => Ok(Method::RbmSymmetric),
            "dmrg" => Ok(Method::Dmrg),
            "vqe" => Ok(Method::Vqe),
            other => Err(Error::Parse(format!("unknown method '{other}'"))),
        }
    }
}

/// One scored (method, n, h, repeat) result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub method: Method,
    pub n: usize,
    #[serde(rename = "J")]
    pub j: f64,
    pub h: f64,
    pub repeat: u32,
    pub seed: u64,
    pub energy: f64,
    pub m2: f64,
    pub infidelity: f64,
    pub energy_error_abs: f64,
    pub energy_error_rel: f64,
    pub m2_error_abs: f64,
    /// Measured solve+score time; defaults to 0 when reading the canonical
    /// (wall-time-free) records.json back in.
    #[serde(default)]
    pub wall_time_s: f64,
    pub converged: bool,
    /// Present only on solver failures; such records carry NaN metrics and
    /// are excluded from aggregation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl BenchmarkRecord {
    pub fn failed(
        config: &SweepConfig,
        method: Method,
        h: f64,
        repeat: u32,
        seed: u64,
        wall_time_s: f64,
        error: String,
    ) -> Self {
        Self {
            method,
            n: config.n,
            j: config.j,
            h,
            repeat,
            seed,
            energy: f64::NAN,
            m2: f64::NAN,
            infidelity: f64::NAN,
            energy_error_abs: f64::NAN,
            energy_error_rel: f64::NAN,
            m2_error_abs: f64::NAN,
            wall_time_s,
            converged: false,
            error: Some(error),
            metadata: BTreeMap::new(),
        }
    }

    pub fn is_failed(&self) -> bool {
        self.error.is_some()
    }

    /// Reject journals produced by a different sweep configuration.
    pub fn check_consistent(&self, config: &SweepConfig) -> Result<()> {
        let expected_seed = job_seed(config.seed_base, self.h, self.method.as_str(), self.repeat);
        if self.n != config.n
            || self.j.to_bits() != config.j.to_bits()
            || self.seed != expected_seed
        {
            return Err(Error::Config(format!(
                "journal record ({}, h = {}, repeat {}) does not match this sweep \
                 configuration; use a fresh output directory",
                self.method.as_str(),
                self.h,
                self.repeat
            )));
        }
        Ok(())
    }
}

/// The deterministic serialization of a record: everything except wall time.
#[derive(Debug, Clone, Serialize)]
pub struct CanonicalRecord<'a> {
    pub method: Method,
    pub n: usize,
    #[serde(rename = "J")]
    pub j: f64,
    pub h: f64,
    pub repeat: u32,
    pub seed: u64,
    pub energy: f64,
    pub m2: f64,
    pub infidelity: f64,
    pub energy_error_abs: f64,
    pub energy_error_rel: f64,
    pub m2_error_abs: f64,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<&'a String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: &'a BTreeMap<String, String>,
}

impl<'a> From<&'a BenchmarkRecord> for CanonicalRecord<'a> {
    fn from(r: &'a BenchmarkRecord) -> Self {
        Self {
            method: r.method,
            n: r.n,
            j: r.j,
            h: r.h,
            repeat: r.repeat,
            seed: r.seed,
            energy: r.energy,
            m2: r.m2,
            infidelity: r.infidelity,
            energy_error_abs: r.energy_error_abs,
            energy_error_rel: r.energy_error_rel,
            m2_error_abs: r.m2_error_abs,
            converged: r.converged,
            error: r.error.as_ref(),
            metadata: &r.metadata,
        }
    }
}

pub type JobKey = (Method, u64, u32);

pub fn key(method: Method, h: f64, repeat: u32) -> JobKey {
    (method, h.to_bits(), repeat)
}

/// Sort by (h, method, repeat); the canonical report ordering.
pub fn canonical_order(a: &BenchmarkRecord, b: &BenchmarkRecord) -> std::cmp::Ordering {
    a.h.total_cmp(&b.h)
        .then(a.method.cmp(&b.method))
        .then(a.repeat.cmp(&b.repeat))
}

/// Load journal records keyed by job; later duplicates win, torn trailing
/// lines are skipped.
pub fn load_journal(path: &Path) -> Result<BTreeMap<JobKey, BenchmarkRecord>> {
    let mut out = BTreeMap::new();
    if !path.exists() {
        return Ok(out);
    }
    let reader = BufReader::new(std::fs::File::open(path)?);
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<BenchmarkRecord>(&line) {
            Ok(rec) => {
                out.insert(key(rec.method, rec.h, rec.repeat), rec);
            }
            Err(err) => {
                log::warn!(
                    "skipping unreadable journal line {} ({err})",
                    lineno + 1
                );
            }
        }
    }
    Ok(out)
}

/// Append-mode journal writer; one JSON record per line, flushed per append.
pub struct JournalWriter {
    file: std::fs::File,
}

impl JournalWriter {
    pub fn open(path: &Path) -> Result<Self> {
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)?;
        Ok(Self { file })
    }

    pub fn append(&mut self, record: &BenchmarkRecord) -> Result<()> {
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()?;
        Ok(())
    }
}

/// records.csv column order, fixed by contract.
pub const CSV_COLUMNS: &str = "method,n,J,h,repeat,seed,energy,m2,infidelity,\
energy_error_abs,energy_error_rel,m2_error_abs,wall_time_s,converged";

pub fn to_csv_line(r: &BenchmarkRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.method.as_str(),
        r.n,
        r.j,
        r.h,
        r.repeat,
        r.seed,
        r.energy,
        r.m2,
        r.infidelity,
        r.energy_error_abs,
        r.energy_error_rel,
        r.m2_error_abs,
        r.wall_time_s,
        r.converged
    )
}

//! Persistence formats, report tables, manifest and figures.
//!
//! Every file is line-oriented text whose first line records the master seed,
//! the config hash and the code version. Floats are written with 17
//! significant digits so that reruns are byte-identical.

mod figures;
mod manifest;
mod oracle_check;
mod records;
mod tables;

use std::path::{Path, PathBuf};

pub use figures::{qq_points, write_figures, FigureSummary, ScatterSummary};
pub use manifest::{verify_manifest, ManifestEntry, ReportBundle, MANIFEST_FILE};
pub use oracle_check::{run_oracle_check, OracleCheckOptions, OracleCheckRow};
pub use records::{read_records, read_spectra, record_columns, write_records, write_spectra, RECORDS_FILE, SPECTRA_FILE};
pub use tables::{analyze_directory, write_sample_outputs, CONFIG_FILE};

use crate::harness::{ConfigError, ExperimentConfig, HarnessError};
use crate::CODE_VERSION;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: schema mismatch at line {line}: {message}")]
    Schema { path: PathBuf, line: usize, message: String },
    #[error("no replicates")]
    NoReplicates,
    #[error("empty spectrum: nothing to plot")]
    EmptySpectrum,
    #[error("manifest mismatch for {file}: {message}")]
    Manifest { file: String, message: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Harness(HarnessError),
}

impl From<HarnessError> for ReportError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::NoReplicates => ReportError::NoReplicates,
            HarnessError::Config(c) => ReportError::Config(c),
            other => ReportError::Harness(other),
        }
    }
}

/// Provenance written at the top of every output file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub master_seed: u64,
    pub config_hash: String,
    pub version: String,
}

impl Provenance {
    pub fn of(cfg: &ExperimentConfig) -> Self {
        Self {
            master_seed: cfg.master_seed,
            config_hash: cfg.config_hash(),
            version: CODE_VERSION.to_string(),
        }
    }

    /// `nonherm-clt <kind> v1 master_seed=… config_sha256=… version=…`
    pub fn line(&self, kind: &str) -> String {
        format!(
            "nonherm-clt {kind} v1 master_seed={} config_sha256={} version={}",
            self.master_seed, self.config_hash, self.version
        )
    }
}

pub(crate) fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<(), ReportError> {
    std::fs::write(path, contents).map_err(|source| ReportError::Io {
        path: path.to_owned(),
        source,
    })
}

pub(crate) fn read_file(path: &Path) -> Result<String, ReportError> {
    std::fs::read_to_string(path).map_err(|source| ReportError::Io {
        path: path.to_owned(),
        source,
    })
}

pub(crate) fn ensure_dir(path: &Path) -> Result<(), ReportError> {
    std::fs::create_dir_all(path).map_err(|source| ReportError::Io {
        path: path.to_owned(),
        source,
    })
}

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{read_file, write_file, Provenance, ReportError};
use crate::harness::{DimensionAnalysis, ExperimentConfig, SweepTable};

pub const MANIFEST_FILE: &str = "manifest.tsv";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Relative to the manifest's directory when the file lives there.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Result of an analysis: config echo, per-dimension tables and the file manifest.
#[derive(Clone, Debug)]
pub struct ReportBundle {
    pub experiment_id: String,
    pub config: ExperimentConfig,
    pub analyses: Vec<DimensionAnalysis>,
    pub sweep: SweepTable,
    pub manifest: Vec<ManifestEntry>,
}

fn hash_file(path: &Path) -> Result<(String, u64), ReportError> {
    let bytes = std::fs::read(path).map_err(|source| ReportError::Io {
        path: path.to_owned(),
        source,
    })?;
    Ok((hex::encode(Sha256::digest(&bytes)), bytes.len() as u64))
}

fn display_path(dir: &Path, file: &Path) -> String {
    match file.parent() {
        Some(p) if p == dir => file.file_name().unwrap_or_default().to_string_lossy().into_owned(),
        _ => file.to_string_lossy().into_owned(),
    }
}

pub(crate) fn write_manifest(
    dir: &Path,
    prov: &Provenance,
    files: &[PathBuf],
) -> Result<Vec<ManifestEntry>, ReportError> {
    let mut entries = Vec::with_capacity(files.len());
    let mut out = format!("# {}\npath\tsha256\tbytes\n", prov.line("manifest"));
    for f in files {
        let (sha256, bytes) = hash_file(f)?;
        let entry = ManifestEntry {
            path: display_path(dir, f),
            sha256,
            bytes,
        };
        let _ = writeln!(out, "{}\t{}\t{}", entry.path, entry.sha256, entry.bytes);
        entries.push(entry);
    }
    write_file(&dir.join(MANIFEST_FILE), &out)?;
    Ok(entries)
}

/// Checks that every file listed in `dir/manifest.tsv` exists and matches
/// its recorded hash.
pub fn verify_manifest(dir: &Path) -> Result<Vec<ManifestEntry>, ReportError> {
    let path = dir.join(MANIFEST_FILE);
    let text = read_file(&path)?;
    let mut entries = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(2) {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            return Err(ReportError::Schema {
                path: path.clone(),
                line: idx + 1,
                message: "expected path, sha256, bytes".into(),
            });
        }
        let target = dir.join(f[0]);
        let (sha256, bytes) = hash_file(&target).map_err(|_| ReportError::Manifest {
            file: f[0].to_string(),
            message: "missing".into(),
        })?;
        if sha256 != f[1] {
            return Err(ReportError::Manifest {
                file: f[0].to_string(),
                message: "content hash differs".into(),
            });
        }
        entries.push(ManifestEntry {
            path: f[0].to_string(),
            sha256,
            bytes,
        });
    }
    Ok(entries)
}

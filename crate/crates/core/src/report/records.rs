use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::{num, read_file, write_file, Provenance, ReportError};
use crate::harness::{DimensionRun, ExperimentConfig, RecordStatus, ReplicateRecord, TRACE_POWERS};
use crate::linalg::Spectrum;
use crate::observables::SpectralDiagnostics;

pub const RECORDS_FILE: &str = "records.tsv";
pub const SPECTRA_FILE: &str = "spectra.tsv";

const SKIPPED: &str = "skipped";

/// Column names of the record file for this configuration.
pub fn record_columns(cfg: &ExperimentConfig) -> Vec<String> {
    let mut cols: Vec<String> = [
        "n",
        "replicate",
        "status",
        "spectral_norm",
        "spectral_radius",
        "kappa",
        "in_omega",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut pair = |stem: String| {
        cols.push(format!("{stem}_re"));
        cols.push(format!("{stem}_im"));
    };
    for i in 0..cfg.functions.len() {
        pair(format!("stat{i}"));
    }
    for k in 0..cfg.z_grid.len() {
        pair(format!("g{k}"));
    }
    for s in 1..=TRACE_POWERS {
        pair(format!("tr{s}"));
    }
    cols.push("cauchy_gap".into());
    cols.push("esd_ks".into());
    cols
}

fn push_complex(line: &mut String, z: Complex64) {
    let _ = write!(line, "\t{}\t{}", num(z.re), num(z.im));
}

fn record_line(rec: &ReplicateRecord) -> String {
    let status = match &rec.status {
        RecordStatus::Ok => "ok".to_string(),
        RecordStatus::Failed(reason) => {
            let clean: String = reason
                .chars()
                .map(|c| if c.is_whitespace() { ' ' } else { c })
                .collect();
            format!("failed: {clean}")
        }
    };
    let d = &rec.diagnostics;
    let mut line = format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}",
        rec.n,
        rec.replicate_index,
        status,
        num(d.spectral_norm),
        num(d.spectral_radius),
        num(d.kappa),
        u8::from(d.in_omega)
    );
    for &z in rec.statistics.iter().chain(&rec.resolvent).chain(&rec.trace_powers) {
        push_complex(&mut line, z);
    }
    match rec.cauchy_gap {
        Some(g) => {
            let _ = write!(line, "\t{}", num(g));
        }
        None => {
            line.push('\t');
            line.push_str(SKIPPED);
        }
    }
    let _ = write!(line, "\t{}", num(rec.esd_ks));
    line
}

/// Writes every record, dimensions in run order and replicates by index.
pub fn write_records(path: &Path, cfg: &ExperimentConfig, runs: &[DimensionRun]) -> Result<(), ReportError> {
    let mut out = format!("# {}\n", Provenance::of(cfg).line("records"));
    out.push_str(&record_columns(cfg).join("\t"));
    out.push('\n');
    for run in runs {
        for rec in &run.records {
            out.push_str(&record_line(rec));
            out.push('\n');
        }
    }
    write_file(path, &out)
}

struct LineParser<'a> {
    path: &'a Path,
    line: usize,
    fields: std::str::Split<'a, char>,
}

impl<'a> LineParser<'a> {
    fn err(&self, message: impl Into<String>) -> ReportError {
        ReportError::Schema {
            path: self.path.to_owned(),
            line: self.line,
            message: message.into(),
        }
    }

    fn field(&mut self) -> Result<&'a str, ReportError> {
        let line = self.line;
        self.fields.next().ok_or_else(|| ReportError::Schema {
            path: self.path.to_owned(),
            line,
            message: "missing fields".into(),
        })
    }

    fn parse<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, ReportError> {
        let raw = self.field()?.to_string();
        raw.parse().map_err(|_| self.err(format!("cannot parse {what} from {raw:?}")))
    }

    fn complex(&mut self, what: &str) -> Result<Complex64, ReportError> {
        Ok(Complex64::new(self.parse(what)?, self.parse(what)?))
    }
}

/// Reads a record file written for `cfg`, checking the header, the column
/// schema, every line's shape and the replicate count of every dimension.
pub fn read_records(path: &Path, cfg: &ExperimentConfig) -> Result<Vec<DimensionRun>, ReportError> {
    let text = read_file(path)?;
    let schema = |line: usize, message: String| ReportError::Schema {
        path: path.to_owned(),
        line,
        message,
    };
    let lines: Vec<&str> = text.split_terminator('\n').collect();
    let header = lines.first().ok_or_else(|| schema(1, "empty file".into()))?;
    let prefix = "# nonherm-clt records v1 ";
    if !header.starts_with(prefix) {
        return Err(schema(1, "not a nonherm-clt record file".into()));
    }
    let hash_field = format!("config_sha256={}", cfg.config_hash());
    if !header.split(' ').any(|f| f == hash_field) {
        return Err(schema(1, "config hash does not match the configuration next to the records".into()));
    }
    let columns = record_columns(cfg);
    match lines.get(1) {
        Some(l) if *l == columns.join("\t") => {}
        Some(_) => return Err(schema(2, "column header does not match the configuration".into())),
        None => return Err(schema(2, "missing column header".into())),
    }
    if !text.ends_with('\n') {
        return Err(schema(lines.len(), "truncated line (no line terminator)".into()));
    }
    if lines.len() == 2 {
        return Err(ReportError::NoReplicates);
    }

    let mut runs: Vec<DimensionRun> = cfg
        .n_values
        .iter()
        .map(|&n| DimensionRun {
            n,
            records: Vec::new(),
            showcase: None,
        })
        .collect();
    for (idx, raw) in lines.iter().enumerate().skip(2) {
        let line_no = idx + 1;
        let count = raw.split('\t').count();
        if count != columns.len() {
            return Err(schema(
                line_no,
                format!("expected {} fields, found {count}", columns.len()),
            ));
        }
        let mut p = LineParser {
            path,
            line: line_no,
            fields: raw.split('\t'),
        };
        let n: usize = p.parse("n")?;
        let replicate_index: u64 = p.parse("replicate")?;
        let status = match p.field()? {
            "ok" => RecordStatus::Ok,
            s if s.starts_with("failed: ") => RecordStatus::Failed(s["failed: ".len()..].to_string()),
            s => return Err(p.err(format!("unknown status {s:?}"))),
        };
        let spectral_norm = p.parse("spectral_norm")?;
        let spectral_radius = p.parse("spectral_radius")?;
        let kappa = p.parse("kappa")?;
        let in_omega = match p.field()? {
            "1" => true,
            "0" => false,
            s => return Err(p.err(format!("in_omega must be 0 or 1, found {s:?}"))),
        };
        let statistics = (0..cfg.functions.len())
            .map(|_| p.complex("statistic"))
            .collect::<Result<Vec<_>, _>>()?;
        let resolvent = (0..cfg.z_grid.len())
            .map(|_| p.complex("resolvent"))
            .collect::<Result<Vec<_>, _>>()?;
        let trace_powers = (0..TRACE_POWERS)
            .map(|_| p.complex("trace power"))
            .collect::<Result<Vec<_>, _>>()?;
        let cauchy_gap = match p.field()? {
            SKIPPED => None,
            s => Some(s.parse().map_err(|_| p.err(format!("cannot parse cauchy_gap from {s:?}")))?),
        };
        let esd_ks = p.parse("esd_ks")?;

        let run = runs
            .iter_mut()
            .find(|r| r.n == n)
            .ok_or_else(|| schema(line_no, format!("dimension {n} is not in the configuration")))?;
        if run.records.len() as u64 != replicate_index {
            return Err(schema(
                line_no,
                format!("expected replicate {} for n = {n}, found {replicate_index}", run.records.len()),
            ));
        }
        run.records.push(ReplicateRecord {
            replicate_index,
            n,
            status,
            diagnostics: SpectralDiagnostics {
                spectral_norm,
                spectral_radius,
                kappa,
                in_omega,
            },
            statistics,
            resolvent,
            trace_powers,
            cauchy_gap,
            esd_ks,
        });
    }
    for run in &runs {
        if run.records.len() != cfg.replicates {
            return Err(schema(
                lines.len(),
                format!(
                    "truncated: n = {} has {} of {} replicates",
                    run.n,
                    run.records.len(),
                    cfg.replicates
                ),
            ));
        }
    }
    Ok(runs)
}

/// Eigenvalues of replicate 0 per dimension.
pub fn write_spectra(path: &Path, cfg: &ExperimentConfig, runs: &[DimensionRun]) -> Result<(), ReportError> {
    let mut out = format!("# {}\nn\tindex\tre\tim\n", Provenance::of(cfg).line("spectra"));
    for run in runs {
        if let Some(s) = &run.showcase {
            for (k, z) in s.eigenvalues().iter().enumerate() {
                let _ = writeln!(out, "{}\t{k}\t{}\t{}", run.n, num(z.re), num(z.im));
            }
        }
    }
    write_file(path, &out)
}

/// Spectra keyed by dimension, in file order.
pub fn read_spectra(path: &Path) -> Result<Vec<(usize, Spectrum)>, ReportError> {
    let text = read_file(path)?;
    let schema = |line: usize, message: &str| ReportError::Schema {
        path: path.to_owned(),
        line,
        message: message.to_string(),
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.starts_with("# nonherm-clt spectra v1 ") => {}
        _ => return Err(schema(1, "not a nonherm-clt spectra file")),
    }
    match lines.next() {
        Some((_, "n\tindex\tre\tim")) => {}
        _ => return Err(schema(2, "column header must be n, index, re, im")),
    }
    let mut out: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for (idx, l) in lines {
        let f: Vec<&str> = l.split('\t').collect();
        if f.len() != 4 {
            return Err(schema(idx + 1, "expected 4 fields"));
        }
        let n: usize = f[0].parse().map_err(|_| schema(idx + 1, "bad dimension"))?;
        let re: f64 = f[2].parse().map_err(|_| schema(idx + 1, "bad real part"))?;
        let im: f64 = f[3].parse().map_err(|_| schema(idx + 1, "bad imaginary part"))?;
        match out.last_mut() {
            Some((m, v)) if *m == n => v.push(Complex64::new(re, im)),
            _ => out.push((n, vec![Complex64::new(re, im)])),
        }
    }
    Ok(out.into_iter().map(|(n, v)| (n, Spectrum::new(v))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::LawKind;
    use crate::harness::run_experiment;

    fn small() -> ExperimentConfig {
        ExperimentConfig::with_defaults(LawKind::ComplexGaussian, vec![3, 5], 4, 11)
    }

    #[test]
    fn round_trip_is_exact() {
        let cfg = small();
        let mut runs = run_experiment(&cfg, None).unwrap();
        runs[0].records[1].cauchy_gap = None;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(RECORDS_FILE);
        write_records(&path, &cfg, &runs).unwrap();
        let back = read_records(&path, &cfg).unwrap();
        for (a, b) in runs.iter().zip(&back) {
            assert_eq!(a.records, b.records);
        }
    }

    #[test]
    fn failed_records_round_trip() {
        let cfg = small();
        let mut runs = run_experiment(&cfg, None).unwrap();
        let nan = Complex64::new(f64::NAN, f64::NAN);
        let rec = &mut runs[1].records[2];
        rec.status = RecordStatus::Failed("QR iteration\tstalled".into());
        rec.statistics.iter_mut().for_each(|z| *z = nan);
        rec.diagnostics.spectral_norm = f64::NAN;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(RECORDS_FILE);
        write_records(&path, &cfg, &runs).unwrap();
        let back = read_records(&path, &cfg).unwrap();
        let got = &back[1].records[2];
        assert_eq!(got.status, RecordStatus::Failed("QR iteration stalled".into()));
        assert!(got.statistics[0].re.is_nan() && got.diagnostics.spectral_norm.is_nan());
    }

    #[test]
    fn spectra_round_trip() {
        let cfg = small();
        let runs = run_experiment(&cfg, None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(SPECTRA_FILE);
        write_spectra(&path, &cfg, &runs).unwrap();
        let back = read_spectra(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(&back[1].1, runs[1].showcase.as_ref().unwrap());
    }
}

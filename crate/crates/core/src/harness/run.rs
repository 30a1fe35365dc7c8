use num_complex::Complex64;
use rayon::prelude::*;

use super::{ExperimentConfig, HarnessError};
use crate::ensembles::MatrixSample;
use crate::linalg::{eigenvalues, trace_powers, Spectrum};
use crate::observables::{
    cauchy_statistic, centered_statistic, esd_radial_ks, resolvent_sample, spectral_diagnostics, ObservableError,
    SpectralDiagnostics,
};
use crate::rng::StreamKey;

/// Number of trace powers `tr M^s`, `s = 1..=TRACE_POWERS`, kept per replicate.
pub const TRACE_POWERS: u32 = 4;
/// A dimension aborts once more than this fraction of replicates fail.
pub const FAILURE_BUDGET: f64 = 0.01;

#[derive(Clone, Debug, PartialEq)]
pub enum RecordStatus {
    Ok,
    Failed(String),
}

/// Everything measured on one sampled matrix. Failed replicates keep their
/// slot with NaN-filled observables.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicateRecord {
    pub replicate_index: u64,
    pub n: usize,
    pub status: RecordStatus,
    pub diagnostics: SpectralDiagnostics,
    /// `X_n(f) − n f(0)` per configured function.
    pub statistics: Vec<Complex64>,
    /// Centered resolvent trace per grid point.
    pub resolvent: Vec<Complex64>,
    /// `tr M^s` for `s = 1..=4`.
    pub trace_powers: Vec<Complex64>,
    /// Worst relative Cauchy-identity gap over the functions; `None` when the
    /// spectrum is not inside the contour.
    pub cauchy_gap: Option<f64>,
    pub esd_ks: f64,
}

impl ReplicateRecord {
    pub fn is_ok(&self) -> bool {
        self.status == RecordStatus::Ok
    }

    fn failed(cfg: &ExperimentConfig, n: usize, replicate_index: u64, reason: String) -> Self {
        let nan = Complex64::new(f64::NAN, f64::NAN);
        Self {
            replicate_index,
            n,
            status: RecordStatus::Failed(reason),
            diagnostics: SpectralDiagnostics {
                spectral_norm: f64::NAN,
                spectral_radius: f64::NAN,
                kappa: cfg.kappa,
                in_omega: false,
            },
            statistics: vec![nan; cfg.functions.len()],
            resolvent: vec![nan; cfg.z_grid.len()],
            trace_powers: vec![nan; TRACE_POWERS as usize],
            cauchy_gap: None,
            esd_ks: f64::NAN,
        }
    }

    /// Observables in the fixed coordinate order used by the estimators:
    /// statistics, then resolvent values, then trace powers.
    pub fn coordinates(&self) -> Vec<Complex64> {
        self.statistics
            .iter()
            .chain(&self.resolvent)
            .chain(&self.trace_powers)
            .copied()
            .collect()
    }
}

/// Records for one dimension, ordered by replicate index.
#[derive(Clone, Debug)]
pub struct DimensionRun {
    pub n: usize,
    pub records: Vec<ReplicateRecord>,
    /// Spectrum of replicate 0, kept for figures.
    pub showcase: Option<Spectrum>,
}

impl DimensionRun {
    pub fn ok_records(&self) -> impl Iterator<Item = &ReplicateRecord> {
        self.records.iter().filter(|r| r.is_ok())
    }

    pub fn failure_count(&self) -> usize {
        self.records.iter().filter(|r| !r.is_ok()).count()
    }
}

/// Measures a single replicate; the stream depends only on
/// `(master_seed, n, replicate_index)`.
pub fn run_replicate(cfg: &ExperimentConfig, n: usize, replicate_index: u64) -> (ReplicateRecord, Option<Spectrum>) {
    match measure(cfg, n, replicate_index) {
        Ok((record, spectrum)) => (record, Some(spectrum)),
        Err(reason) => (ReplicateRecord::failed(cfg, n, replicate_index, reason), None),
    }
}

fn measure(cfg: &ExperimentConfig, n: usize, replicate_index: u64) -> Result<(ReplicateRecord, Spectrum), String> {
    let key = StreamKey::new(cfg.master_seed, replicate_index);
    let sample = MatrixSample::generate(cfg.entry_law(), n, key).map_err(|e| e.to_string())?;
    let m = &sample.matrix;
    let spectrum = eigenvalues(m).map_err(|e| e.to_string())?;
    let diagnostics = spectral_diagnostics(m, &spectrum, cfg.kappa).map_err(|e| e.to_string())?;
    let statistics: Vec<Complex64> = cfg.functions.iter().map(|f| centered_statistic(&spectrum, f)).collect();
    let resolvent = resolvent_sample(&spectrum, &cfg.z_grid, replicate_index)
        .map_err(|e| e.to_string())?
        .values;
    let trace_powers = trace_powers(m, TRACE_POWERS).map_err(|e| e.to_string())?;

    let mut cauchy_gap = Some(0.0_f64);
    for (f, &direct) in cfg.functions.iter().zip(&statistics) {
        match cauchy_statistic(&spectrum, f, &cfg.contour) {
            Ok(v) => {
                let gap = (v - direct).norm() / (1.0 + direct.norm());
                cauchy_gap = cauchy_gap.map(|g| g.max(gap));
            }
            Err(ObservableError::EigenvalueOutsideContour { .. } | ObservableError::PoleCollision { .. }) => {
                cauchy_gap = None;
                break;
            }
            Err(e) => return Err(e.to_string()),
        }
    }
    let esd_ks = esd_radial_ks(&spectrum).map_err(|e| e.to_string())?;

    Ok((
        ReplicateRecord {
            replicate_index,
            n,
            status: RecordStatus::Ok,
            diagnostics,
            statistics,
            resolvent,
            trace_powers,
            cauchy_gap,
            esd_ks,
        },
        spectrum,
    ))
}

/// All replicates for one dimension. `threads = None` uses the global pool;
/// results never depend on the thread count.
pub fn run_dimension(cfg: &ExperimentConfig, n: usize, threads: Option<usize>) -> Result<DimensionRun, HarnessError> {
    let work = || -> Vec<(ReplicateRecord, Option<Spectrum>)> {
        (0..cfg.replicates as u64)
            .into_par_iter()
            .map(|r| run_replicate(cfg, n, r))
            .collect()
    };
    let results = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| HarnessError::ThreadPool(e.to_string()))?
            .install(work),
        None => work(),
    };
    let mut showcase = None;
    let mut records = Vec::with_capacity(results.len());
    for (record, spectrum) in results {
        if record.replicate_index == 0 {
            showcase = spectrum;
        }
        records.push(record);
    }
    let run = DimensionRun { n, records, showcase };
    let failures = run.failure_count();
    if failures as f64 > FAILURE_BUDGET * cfg.replicates as f64 {
        return Err(HarnessError::FailureBudget {
            n,
            failures,
            replicates: cfg.replicates,
        });
    }
    Ok(run)
}

/// Every dimension of the experiment, in configuration order.
pub fn run_experiment(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<DimensionRun>, HarnessError> {
    cfg.validate()?;
    cfg.n_values.iter().map(|&n| run_dimension(cfg, n, threads)).collect()
}

use num_complex::Complex64;

use super::{
    compare_to_theory, estimate_moments, normality_diagnostics, DeviationRow, DimensionRun, EstimateReport,
    ExperimentConfig, HarnessError, NormalityReport, QuantityKind, Regime, MIN_NORMALITY_REPLICATES,
};

/// Normality of the real or imaginary part of one linear statistic.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateNormality {
    pub quantity: String,
    pub report: NormalityReport,
}

/// Everything estimated for one dimension.
#[derive(Clone, Debug)]
pub struct DimensionAnalysis {
    pub n: usize,
    pub replicates: usize,
    pub failures: usize,
    pub estimate: EstimateReport,
    pub deviations: Vec<DeviationRow>,
    /// Empty when fewer than 500 replicates succeeded.
    pub normality: Vec<CoordinateNormality>,
    /// `Var(Re X) / Var(Im X)` per configured function.
    pub variance_ratios: Vec<f64>,
    pub mean_esd_ks: f64,
    pub mean_spectral_norm: f64,
    pub mean_spectral_radius: f64,
    pub fraction_outside_omega: f64,
    pub cauchy_checked: usize,
    pub cauchy_skipped: usize,
    pub max_cauchy_gap: f64,
}

/// Runs every estimator on the successful records of each dimension.
/// Reductions iterate in replicate order.
pub fn analyze_runs(cfg: &ExperimentConfig, runs: &[DimensionRun]) -> Result<Vec<DimensionAnalysis>, HarnessError> {
    if runs.is_empty() {
        return Err(HarnessError::NoReplicates);
    }
    runs.iter().map(|run| analyze_dimension(cfg, run)).collect()
}

fn analyze_dimension(cfg: &ExperimentConfig, run: &DimensionRun) -> Result<DimensionAnalysis, HarnessError> {
    let ok: Vec<_> = run.ok_records().collect();
    if ok.len() < 2 {
        return Err(HarnessError::NoReplicates);
    }
    let r = ok.len() as f64;
    let samples: Vec<Vec<Complex64>> = ok.iter().map(|rec| rec.coordinates()).collect();
    let estimate = estimate_moments(&samples);
    let deviations = compare_to_theory(&estimate, cfg, run.n);

    let mut normality = Vec::new();
    if ok.len() >= MIN_NORMALITY_REPLICATES {
        for (i, f) in cfg.functions.iter().enumerate() {
            for (part, pick) in [("Re", 0usize), ("Im", 1)] {
                let xs: Vec<f64> = ok
                    .iter()
                    .map(|rec| if pick == 0 { rec.statistics[i].re } else { rec.statistics[i].im })
                    .collect();
                normality.push(CoordinateNormality {
                    quantity: format!("{part}X({})", f.label()),
                    report: normality_diagnostics(&xs)?,
                });
            }
        }
    }

    let variance_ratios = (0..cfg.functions.len())
        .map(|i| {
            let c = estimate.cov(i, i).re;
            let p = estimate.pseudo(i, i).re;
            (c + p) / (c - p)
        })
        .collect();

    let mean = |get: &dyn Fn(&super::ReplicateRecord) -> f64| ok.iter().map(|rec| get(rec)).sum::<f64>() / r;
    let gaps: Vec<f64> = ok.iter().filter_map(|rec| rec.cauchy_gap).collect();

    Ok(DimensionAnalysis {
        n: run.n,
        replicates: ok.len(),
        failures: run.failure_count(),
        variance_ratios,
        mean_esd_ks: mean(&|rec| rec.esd_ks),
        mean_spectral_norm: mean(&|rec| rec.diagnostics.spectral_norm),
        mean_spectral_radius: mean(&|rec| rec.diagnostics.spectral_radius),
        fraction_outside_omega: ok.iter().filter(|rec| !rec.diagnostics.in_omega).count() as f64 / r,
        cauchy_checked: gaps.len(),
        cauchy_skipped: ok.len() - gaps.len(),
        max_cauchy_gap: gaps.iter().copied().fold(0.0, f64::max),
        estimate,
        deviations,
        normality,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub replicates: usize,
    pub mean_esd_ks: f64,
    pub mean_spectral_norm: f64,
    pub mean_spectral_radius: f64,
    pub fraction_outside_omega: f64,
    /// Largest `|Ĉ − C|` over in-theorem covariance rows.
    pub max_covariance_deviation: f64,
    pub max_covariance_z: f64,
}

/// Direction of each diagnostic as `n` grows. Norm and radius are judged by
/// their distance to the limits 2 and 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrendSummary {
    pub esd_ks_decreasing: bool,
    pub norm_approaching_limit: bool,
    pub radius_approaching_limit: bool,
    pub omega_fraction_nonincreasing: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// Present once at least three dimensions were run.
    pub trend: Option<TrendSummary>,
}

pub fn convergence_sweep(analyses: &[DimensionAnalysis]) -> SweepTable {
    let mut rows: Vec<SweepRow> = analyses
        .iter()
        .map(|a| {
            let cov = a
                .deviations
                .iter()
                .filter(|d| d.kind == QuantityKind::Covariance && d.regime == Regime::Theorem);
            SweepRow {
                n: a.n,
                replicates: a.replicates,
                mean_esd_ks: a.mean_esd_ks,
                mean_spectral_norm: a.mean_spectral_norm,
                mean_spectral_radius: a.mean_spectral_radius,
                fraction_outside_omega: a.fraction_outside_omega,
                max_covariance_deviation: cov.clone().map(|d| d.deviation).fold(0.0, f64::max),
                max_covariance_z: cov.map(|d| d.z_score).fold(0.0, f64::max),
            }
        })
        .collect();
    rows.sort_by_key(|row| row.n);
    let trend = (rows.len() >= 3).then(|| {
        let strictly_down = |v: Vec<f64>| v.windows(2).all(|w| w[1] < w[0]);
        TrendSummary {
            esd_ks_decreasing: strictly_down(rows.iter().map(|r| r.mean_esd_ks).collect()),
            norm_approaching_limit: strictly_down(rows.iter().map(|r| (r.mean_spectral_norm - 2.0).abs()).collect()),
            radius_approaching_limit: strictly_down(
                rows.iter().map(|r| (r.mean_spectral_radius - 1.0).abs()).collect(),
            ),
            omega_fraction_nonincreasing: rows
                .windows(2)
                .all(|w| w[1].fraction_outside_omega <= w[0].fraction_outside_omega),
        }
    });
    SweepTable { rows, trend }
}

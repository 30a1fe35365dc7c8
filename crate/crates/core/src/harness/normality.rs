use super::estimate::shape;
use super::HarnessError;
use crate::observables::ks_against_cdf;

pub const MIN_NORMALITY_REPLICATES: usize = 500;
/// Flag threshold in standard errors for skewness and kurtosis.
const SHAPE_FLAG: f64 = 4.0;
/// Asymptotic 1% critical value of `sqrt(R)·D`.
const KS_CRITICAL: f64 = 1.63;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalityReport {
    pub samples: usize,
    pub skewness: f64,
    pub skewness_se: f64,
    pub excess_kurtosis: f64,
    pub kurtosis_se: f64,
    /// KS distance to the normal law with the sample's mean and variance.
    pub ks_distance: f64,
    pub ks_threshold: f64,
}

impl NormalityReport {
    pub fn skewness_flag(&self) -> bool {
        self.skewness.abs() > SHAPE_FLAG * self.skewness_se
    }

    pub fn kurtosis_flag(&self) -> bool {
        self.excess_kurtosis.abs() > SHAPE_FLAG * self.kurtosis_se
    }

    pub fn ks_flag(&self) -> bool {
        self.ks_distance > self.ks_threshold
    }

    pub fn passes(&self) -> bool {
        !(self.skewness_flag() || self.kurtosis_flag() || self.ks_flag())
    }
}

fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Moment diagnostics plus an empirical-CDF distance for one real coordinate.
pub fn normality_diagnostics(samples: &[f64]) -> Result<NormalityReport, HarnessError> {
    let r = samples.len();
    if r < MIN_NORMALITY_REPLICATES {
        return Err(HarnessError::TooFewSamples {
            needed: MIN_NORMALITY_REPLICATES,
            got: r,
        });
    }
    let rf = r as f64;
    let mean = samples.iter().sum::<f64>() / rf;
    let s = shape(samples.iter().map(|x| x - mean));
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (rf - 1.0);
    let sd = var.sqrt();
    let ks_distance = if sd > 0.0 {
        let mut z: Vec<f64> = samples.iter().map(|x| (x - mean) / sd).collect();
        z.sort_by(f64::total_cmp);
        ks_against_cdf(&z, normal_cdf)
    } else {
        1.0
    };
    Ok(NormalityReport {
        samples: r,
        skewness: s.skewness,
        skewness_se: (6.0 / rf).sqrt(),
        excess_kurtosis: s.excess_kurtosis,
        kurtosis_se: (24.0 / rf).sqrt(),
        ks_distance,
        ks_threshold: KS_CRITICAL / rf.sqrt(),
    })
}

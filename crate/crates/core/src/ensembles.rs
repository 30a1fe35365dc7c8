//! Entry laws for the base matrix and the `1/√n`-scaled matrix sampler.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;
use crate::rng::{open_unit, Domain, StreamKey};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EnsembleError {
    #[error("unknown entry law {0:?} (expected complex-gaussian, uniform-disk, unit-circle or complex-rademacher)")]
    UnknownLaw(String),
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("moment self-check needs k_max <= 12 and at least 10^4 draws (got k_max = {k_max}, draws = {draws})")]
    InvalidSelfCheck { k_max: u32, draws: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LawKind {
    ComplexGaussian,
    UniformDisk,
    UnitCircle,
    ComplexRademacher,
}

impl LawKind {
    pub const ALL: [LawKind; 4] = [
        LawKind::ComplexGaussian,
        LawKind::UniformDisk,
        LawKind::UnitCircle,
        LawKind::ComplexRademacher,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LawKind::ComplexGaussian => "complex-gaussian",
            LawKind::UniformDisk => "uniform-disk",
            LawKind::UnitCircle => "unit-circle",
            LawKind::ComplexRademacher => "complex-rademacher",
        }
    }
}

impl fmt::Display for LawKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LawKind {
    type Err = EnsembleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LawKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| EnsembleError::UnknownLaw(s.to_owned()))
    }
}

/// An entry distribution together with which entry hypotheses it meets:
/// vanishing pseudo-moment, polynomial moment growth and a bounded joint
/// density of real and imaginary parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EntryLaw {
    pub kind: LawKind,
    pub satisfies_pseudo_moment: bool,
    pub satisfies_moment_growth: bool,
    pub satisfies_bounded_density: bool,
}

impl EntryLaw {
    pub fn new(kind: LawKind) -> Self {
        let bounded_density = matches!(kind, LawKind::ComplexGaussian | LawKind::UniformDisk);
        Self {
            kind,
            satisfies_pseudo_moment: true,
            satisfies_moment_growth: true,
            satisfies_bounded_density: bounded_density,
        }
    }

    pub fn is_compliant(&self) -> bool {
        self.satisfies_pseudo_moment && self.satisfies_moment_growth && self.satisfies_bounded_density
    }

    /// Exact `E|m|^k` for the law.
    pub fn abs_moment(&self, k: u32) -> f64 {
        match self.kind {
            // Γ(1 + k/2)
            LawKind::ComplexGaussian => gamma_half_integer(k + 2),
            // uniform on the disk of radius √2: 2 R^k / (k + 2)
            LawKind::UniformDisk => 2.0 * 2f64.powf(k as f64 / 2.0) / (k as f64 + 2.0),
            LawKind::UnitCircle | LawKind::ComplexRademacher => 1.0,
        }
    }
}

impl FromStr for EntryLaw {
    type Err = EnsembleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(EntryLaw::new(s.parse()?))
    }
}

/// `Γ(m / 2)` for a positive integer `m`.
fn gamma_half_integer(m: u32) -> f64 {
    let mut value = if m.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut x = if m.is_multiple_of(2) { 1.0 } else { 0.5 };
    while 2.0 * x < m as f64 {
        value *= x;
        x += 1.0;
    }
    value
}

/// One draw from `law`. Every law consumes exactly two `u64` words so that
/// entry `k` of a matrix sits at a fixed stream position.
pub fn sample_entry(law: &EntryLaw, rng: &mut impl RngCore) -> Complex64 {
    match law.kind {
        LawKind::ComplexGaussian => {
            let radius = (-open_unit(rng).ln()).sqrt();
            Complex64::from_polar(radius, TAU * open_unit(rng))
        }
        LawKind::UniformDisk => {
            let radius = (2.0 * open_unit(rng)).sqrt();
            Complex64::from_polar(radius, TAU * open_unit(rng))
        }
        LawKind::UnitCircle => {
            let _ = rng.next_u64();
            Complex64::from_polar(1.0, TAU * open_unit(rng))
        }
        LawKind::ComplexRademacher => {
            let sign = |bits: u64| if bits >> 63 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
            let re = sign(rng.next_u64());
            let im = sign(rng.next_u64());
            Complex64::new(re, im)
        }
    }
}

/// `n²` entries in row-major order, each scaled by `1/√n`.
pub fn sample_matrix(law: &EntryLaw, n: usize, rng: &mut impl RngCore) -> Result<ComplexMatrix, EnsembleError> {
    if n == 0 {
        return Err(EnsembleError::ZeroDimension);
    }
    let scale = 1.0 / (n as f64).sqrt();
    let data = (0..n * n).map(|_| sample_entry(law, rng) * scale).collect();
    Ok(ComplexMatrix::from_row_major(n, data).expect("sampled entries are finite"))
}

/// A sampled matrix with the key that regenerates it.
#[derive(Clone, Debug)]
pub struct MatrixSample {
    pub law: EntryLaw,
    pub n: usize,
    pub matrix: ComplexMatrix,
    pub replicate_index: u64,
    pub seed_material: StreamKey,
}

impl MatrixSample {
    pub fn generate(law: EntryLaw, n: usize, seed_material: StreamKey) -> Result<Self, EnsembleError> {
        let mut rng = seed_material.stream(Domain::MatrixEntries, n);
        let matrix = sample_matrix(&law, n, &mut rng)?;
        Ok(Self {
            law,
            n,
            matrix,
            replicate_index: seed_material.replicate_index,
            seed_material,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentEstimate {
    pub estimate: Complex64,
    pub standard_error: f64,
    pub theory: Complex64,
}

impl MomentEstimate {
    pub fn z_score(&self) -> f64 {
        let dev = (self.estimate - self.theory).norm();
        if self.standard_error > 0.0 {
            dev / self.standard_error
        } else if dev <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Clone, Debug)]
pub struct MomentReport {
    pub law: EntryLaw,
    pub draws: usize,
    pub mean: MomentEstimate,
    pub pseudo_moment: MomentEstimate,
    /// `E|m|^k` for `k = 1..=k_max`.
    pub abs_moments: Vec<MomentEstimate>,
    /// Defining moments (`E m`, `E m²`, `E|m|²`) off by more than four standard errors.
    pub violations: Vec<String>,
}

/// Empirical moments of `law` with standard errors.
pub fn moment_selfcheck(
    law: &EntryLaw,
    k_max: u32,
    draws: usize,
    rng: &mut impl RngCore,
) -> Result<MomentReport, EnsembleError> {
    if k_max > 12 || draws < 10_000 {
        return Err(EnsembleError::InvalidSelfCheck { k_max, draws });
    }
    let k_max = k_max.max(2);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sum_sq = Complex64::new(0.0, 0.0);
    let mut pseudo_sq = 0.0;
    let mut abs_sum = vec![0.0; k_max as usize];
    let mut abs_sq_sum = vec![0.0; k_max as usize];
    for _ in 0..draws {
        let m = sample_entry(law, rng);
        sum += m;
        let m2 = m * m;
        sum_sq += m2;
        pseudo_sq += m2.norm_sqr();
        let r = m.norm();
        let mut rk = 1.0;
        for k in 0..k_max as usize {
            rk *= r;
            abs_sum[k] += rk;
            abs_sq_sum[k] += rk * rk;
        }
    }
    let count = draws as f64;
    let se = |mean_sq: f64, mean_abs_sq: f64| ((mean_sq - mean_abs_sq).max(0.0) / (count - 1.0)).sqrt();

    let mean_value = sum / count;
    let second_abs = abs_sum[1] / count;
    let mean = MomentEstimate {
        estimate: mean_value,
        standard_error: se(second_abs, mean_value.norm_sqr()),
        theory: Complex64::new(0.0, 0.0),
    };
    let pseudo_value = sum_sq / count;
    let pseudo_moment = MomentEstimate {
        estimate: pseudo_value,
        standard_error: se(pseudo_sq / count, pseudo_value.norm_sqr()),
        theory: Complex64::new(0.0, 0.0),
    };
    let abs_moments: Vec<MomentEstimate> = (0..k_max as usize)
        .map(|k| {
            let m = abs_sum[k] / count;
            MomentEstimate {
                estimate: Complex64::new(m, 0.0),
                standard_error: se(abs_sq_sum[k] / count, m * m),
                theory: Complex64::new(law.abs_moment(k as u32 + 1), 0.0),
            }
        })
        .collect();

    let mut violations = Vec::new();
    for (label, est) in [("E m", &mean), ("E m^2", &pseudo_moment), ("E|m|^2", &abs_moments[1])] {
        if est.z_score() > 4.0 {
            violations.push(format!(
                "{label}: estimate {} vs {} ({:.2} standard errors)",
                est.estimate,
                est.theory,
                est.z_score()
            ));
        }
    }
    Ok(MomentReport {
        law: *law,
        draws,
        mean,
        pseudo_moment,
        abs_moments,
        violations,
    })
}

//! Limit-law quantities: the disk covariance of analytic statistics, the
//! resolvent kernel `(1 − z w̄)^{-2}`, the two routes that connect them, and
//! the Gaussian analytic function representing the limiting resolvent.

use num_complex::Complex64;
use rand::RngCore;

use crate::ensembles::{sample_entry, EntryLaw, LawKind};
use crate::observables::{Contour, TestFunction};
use crate::quadrature::DiskQuadrature;

/// Points closer than this to the kernel singularity `z w̄ = 1` are rejected.
pub const SINGULARITY_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_GAF_TRUNCATION: usize = 512;
/// Sample points must satisfy `|z| >= 1 + GAF_MARGIN`.
pub const GAF_MARGIN: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("kernel is singular at z = {z}, w = {w} (|1 - z conj(w)| < 1e-12)")]
    SingularPoint { z: Complex64, w: Complex64 },
    #[error("series needs |z conj(w)| > 1 (got z = {z}, w = {w})")]
    OutsideConvergence { z: Complex64, w: Complex64 },
    #[error("GAF truncation must be at least 1")]
    ZeroTruncation,
    #[error("GAF evaluation point {0} must satisfy |z| >= 1.001")]
    PointTooClose(Complex64),
}

/// `(1/π) ∫_U (d/dz z^m) conj(d/dz z^n) d²z`, which is `m` on the diagonal
/// and zero off it.
pub fn limit_covariance_monomials(m: u32, n: u32) -> f64 {
    if m == n {
        m as f64
    } else {
        0.0
    }
}

/// Sesquilinear extension of [`limit_covariance_monomials`] to polynomials:
/// `Σ_m m a_m conj(b_m)`.
pub fn limit_covariance_closed(f: &TestFunction, g: &TestFunction) -> Complex64 {
    f.coefficients()
        .iter()
        .zip(g.coefficients())
        .enumerate()
        .skip(1)
        .map(|(m, (a, b))| a * b.conj() * limit_covariance_monomials(m as u32, m as u32))
        .sum()
}

/// `(1/π) ∫_U f'(z) conj(g'(z)) d²z` by disk quadrature.
pub fn limit_covariance_quadrature(f: &TestFunction, g: &TestFunction, q: &DiskQuadrature) -> Complex64 {
    let df = f.derivative();
    let dg = g.derivative();
    q.average(|z| df.eval(z) * dg.eval(z).conj())
}

/// Limiting resolvent covariance `E[G(z) conj G(w)] = (1 − z w̄)^{-2}`.
pub fn resolvent_covariance(z: Complex64, w: Complex64) -> Result<Complex64, OracleError> {
    let base = Complex64::new(1.0, 0.0) - z * w.conj();
    if base.norm() < SINGULARITY_TOLERANCE {
        return Err(OracleError::SingularPoint { z, w });
    }
    Ok((base * base).inv())
}

/// Result of evaluating both sides of an identity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub gap: f64,
}

impl IdentityCheck {
    fn new(lhs: Complex64, rhs: Complex64) -> Self {
        Self {
            lhs,
            rhs,
            gap: (lhs - rhs).norm(),
        }
    }
}

/// `(1/π) ∫_U d²η / ((η − z)² (η̄ − w̄)²)` by disk quadrature.
pub fn bergman_kernel_quadrature(z: Complex64, w: Complex64, q: &DiskQuadrature) -> Complex64 {
    let wc = w.conj();
    q.average(|eta| {
        let a = eta - z;
        let b = eta.conj() - wc;
        (a * a * b * b).inv()
    })
}

/// Compares the area integral of the squared Cauchy kernels with `(1 − z w̄)^{-2}`.
pub fn bergman_identity_check(z: Complex64, w: Complex64, q: &DiskQuadrature) -> Result<IdentityCheck, OracleError> {
    let rhs = resolvent_covariance(z, w)?;
    Ok(IdentityCheck::new(bergman_kernel_quadrature(z, w, q), rhs))
}

/// Double contour integral
/// `(1/2πi)∮dz · conj((1/2πi)∮dw) f(z) conj(g(w)) K(z, w)` by nested
/// trapezoid rules; with `dz/(2πi) = z dθ/2π` each node carries weight `z/M`.
pub fn contour_covariance_with_kernel(
    f: &TestFunction,
    g: &TestFunction,
    contour: &Contour,
    mut kernel: impl FnMut(Complex64, Complex64) -> Complex64,
) -> Complex64 {
    let nodes: Vec<Complex64> = contour.nodes().collect();
    let fz: Vec<Complex64> = nodes.iter().map(|&z| z * f.eval(z)).collect();
    let gw: Vec<Complex64> = nodes.iter().map(|&w| (w * g.eval(w)).conj()).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for (&z, &a) in nodes.iter().zip(&fz) {
        let row: Complex64 = nodes.iter().zip(&gw).map(|(&w, &b)| b * kernel(z, w)).sum();
        total += a * row;
    }
    let m = nodes.len() as f64;
    total / (m * m)
}

/// Disk covariance of `(f, g)` against the double contour integral with
/// the closed-form kernel.
pub fn contour_covariance_identity(
    f: &TestFunction,
    g: &TestFunction,
    contour: &Contour,
    q: &DiskQuadrature,
) -> Result<IdentityCheck, OracleError> {
    let lhs = limit_covariance_quadrature(f, g, q);
    let mut failure = None;
    let rhs = contour_covariance_with_kernel(f, g, contour, |z, w| match resolvent_covariance(z, w) {
        Ok(k) => k,
        Err(e) => {
            failure.get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(IdentityCheck::new(lhs, rhs)),
    }
}

/// Same right-hand side, but with the kernel itself obtained from disk
/// quadrature instead of the closed form.
pub fn contour_covariance_identity_raw(
    f: &TestFunction,
    g: &TestFunction,
    contour: &Contour,
    q: &DiskQuadrature,
) -> IdentityCheck {
    let lhs = limit_covariance_quadrature(f, g, q);
    let rhs = contour_covariance_with_kernel(f, g, contour, |z, w| bergman_kernel_quadrature(z, w, q));
    IdentityCheck::new(lhs, rhs)
}

/// Truncation of the Gaussian analytic function `Σ_k √k Z_k z^{-(k+1)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GafConfig {
    pub truncation: usize,
}

impl GafConfig {
    pub fn new(truncation: usize) -> Result<Self, OracleError> {
        if truncation == 0 {
            return Err(OracleError::ZeroTruncation);
        }
        Ok(Self { truncation })
    }

    /// Bound on the neglected covariance mass at `(z, w)`.
    pub fn tail_bound(&self, z: Complex64, w: Complex64) -> Result<f64, OracleError> {
        Ok(gaf_covariance_truncated(self.truncation, z, w)?.tail_bound)
    }
}

impl Default for GafConfig {
    fn default() -> Self {
        Self {
            truncation: DEFAULT_GAF_TRUNCATION,
        }
    }
}

/// One joint draw of the truncated series at every point, sharing the
/// coefficient sequence `Z_1, …, Z_K`.
pub fn gaf_sample(cfg: &GafConfig, points: &[Complex64], rng: &mut impl RngCore) -> Result<Vec<Complex64>, OracleError> {
    if let Some(z) = points.iter().find(|z| z.norm() < 1.0 + GAF_MARGIN) {
        return Err(OracleError::PointTooClose(*z));
    }
    let law = EntryLaw::new(LawKind::ComplexGaussian);
    let coefficients: Vec<Complex64> = (1..=cfg.truncation)
        .map(|k| sample_entry(&law, rng) * (k as f64).sqrt())
        .collect();
    Ok(points
        .iter()
        .map(|&z| {
            let u = z.inv();
            let mut power = u;
            let mut acc = Complex64::new(0.0, 0.0);
            for c in &coefficients {
                power *= u;
                acc += c * power;
            }
            acc
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncatedCovariance {
    pub partial: Complex64,
    /// Majorant for `|partial − (1 − z w̄)^{-2}|`, including a rounding allowance.
    pub tail_bound: f64,
}

/// `Σ_{k=1}^{K} k (z w̄)^{-(k+1)}` and the geometric majorant of the rest,
/// `Σ_{k>K} k r^{k+1} = r^{K+2} ((K+1) − K r) / (1 − r)²` with `r = 1/|z w̄|`.
pub fn gaf_covariance_truncated(truncation: usize, z: Complex64, w: Complex64) -> Result<TruncatedCovariance, OracleError> {
    let x = (z * w.conj()).inv();
    let r = x.norm();
    if r >= 1.0 {
        return Err(OracleError::OutsideConvergence { z, w });
    }
    let mut power = x;
    let mut partial = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for k in 1..=truncation {
        power *= x;
        let term = power * k as f64;
        partial += term;
        // term k carries ~(k + 1) roundings from the running power.
        abs_sum += (k as f64 + 2.0) * term.norm();
    }
    let k = truncation as f64;
    let tail = r.powi(truncation as i32 + 2) * ((k + 1.0) - k * r) / ((1.0 - r) * (1.0 - r));
    let rounding = 2.0 * f64::EPSILON * abs_sum;
    Ok(TruncatedCovariance {
        partial,
        tail_bound: tail + rounding,
    })
}

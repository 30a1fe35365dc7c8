//! Per-sample observables computed from a spectrum: linear statistics, the
//! centered resolvent trace, its Cauchy-integral representation, a radial
//! circular-law distance and norm/radius diagnostics.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex_serde;
use crate::linalg::{largest_singular_value, ComplexMatrix, LinalgError, Spectrum};

/// Minimum distance between an evaluation point and an eigenvalue.
pub const POLE_TOLERANCE: f64 = 1e-12;
/// Eigenvalues must stay this far inside the contour.
pub const CONTAINMENT_MARGIN: f64 = 1e-9;
pub const DEFAULT_CONTOUR_NODES: usize = 512;
pub const DEFAULT_KAPPA: f64 = 2.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ObservableError {
    #[error("evaluation point {z} is within {distance:e} of eigenvalue {eigenvalue}")]
    PoleCollision {
        z: Complex64,
        eigenvalue: Complex64,
        distance: f64,
    },
    #[error("resolvent fluctuation is undefined at z = 0")]
    ZeroPoint,
    #[error("{} eigenvalue(s) not strictly inside the contour of radius {radius}: {offending:?}", offending.len())]
    EigenvalueOutsideContour { radius: f64, offending: Vec<Complex64> },
    #[error("grid point {0} must satisfy |z| > 1")]
    GridPointInsideDisk(Complex64),
    #[error("contour radius must exceed 1 (got {0})")]
    ContourRadius(f64),
    #[error("contour node count must be even and at least 64 (got {0})")]
    ContourNodes(usize),
    #[error("kappa must exceed 2 (got {0})")]
    Kappa(f64),
    #[error("test function needs at least one coefficient")]
    EmptyFunction,
    #[error("radial KS distance needs at least two eigenvalues")]
    TooFewEigenvalues,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Polynomial test function `f(z) = Σ c_j z^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    #[serde(with = "complex_serde::vec")]
    coefficients: Vec<Complex64>,
}

impl TestFunction {
    pub fn new(coefficients: Vec<Complex64>) -> Result<Self, ObservableError> {
        if coefficients.is_empty() {
            return Err(ObservableError::EmptyFunction);
        }
        Ok(Self { coefficients })
    }

    pub fn from_real(coefficients: &[f64]) -> Result<Self, ObservableError> {
        Self::new(coefficients.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `z^m`.
    pub fn monomial(m: usize) -> Self {
        let mut coefficients = vec![Complex64::new(0.0, 0.0); m + 1];
        coefficients[m] = Complex64::new(1.0, 0.0);
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Index of the highest nonzero coefficient (0 for constants).
    pub fn degree(&self) -> usize {
        self.coefficients
            .iter()
            .rposition(|c| *c != Complex64::new(0.0, 0.0))
            .unwrap_or(0)
    }

    pub fn at_zero(&self) -> Complex64 {
        self.coefficients[0]
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> TestFunction {
        if self.coefficients.len() == 1 {
            return Self {
                coefficients: vec![Complex64::new(0.0, 0.0)],
            };
        }
        Self {
            coefficients: self
                .coefficients
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c * j as f64)
                .collect(),
        }
    }

    /// Short label such as `z`, `z^2` or `poly3` for table headers.
    pub fn label(&self) -> String {
        let nonzero: Vec<usize> = (0..self.coefficients.len())
            .filter(|&j| self.coefficients[j] != Complex64::new(0.0, 0.0))
            .collect();
        match nonzero.as_slice() {
            [j] if self.coefficients[*j] == Complex64::new(1.0, 0.0) => match j {
                0 => "1".to_owned(),
                1 => "z".to_owned(),
                j => format!("z^{j}"),
            },
            _ => format!("poly{}", self.degree()),
        }
    }
}

/// `X_n(f) − n f(0)` for one replicate.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearStatisticSample {
    pub value: Complex64,
    pub n: usize,
    pub function_id: usize,
    pub replicate_index: u64,
}

/// Centered resolvent trace on a grid of points outside the unit disk.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolventSample {
    pub grid: Vec<Complex64>,
    pub values: Vec<Complex64>,
    pub n: usize,
    pub replicate_index: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralDiagnostics {
    pub spectral_norm: f64,
    pub spectral_radius: f64,
    pub kappa: f64,
    pub in_omega: bool,
}

/// Origin-centered circle with equispaced trapezoid nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub radius: f64,
    pub node_count: usize,
}

impl Contour {
    pub fn new(radius: f64, node_count: usize) -> Result<Self, ObservableError> {
        let c = Self { radius, node_count };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ObservableError> {
        if !(self.radius > 1.0 && self.radius.is_finite()) {
            return Err(ObservableError::ContourRadius(self.radius));
        }
        if self.node_count < 64 || !self.node_count.is_multiple_of(2) {
            return Err(ObservableError::ContourNodes(self.node_count));
        }
        Ok(())
    }

    /// Nodes `ρ e^{2πij/M}`.
    pub fn nodes(&self) -> impl Iterator<Item = Complex64> + '_ {
        let m = self.node_count;
        (0..m).map(move |j| Complex64::from_polar(self.radius, TAU * j as f64 / m as f64))
    }
}

impl Default for Contour {
    fn default() -> Self {
        Self {
            radius: 5.0,
            node_count: DEFAULT_CONTOUR_NODES,
        }
    }
}

/// Default evaluation grid: eight points on `|z| = 5` and eight on `|z| = 1.5`.
pub fn default_resolvent_grid() -> Vec<Complex64> {
    [5.0, 1.5]
        .iter()
        .flat_map(|&r| (0..8).map(move |k| Complex64::from_polar(r, TAU * k as f64 / 8.0)))
        .collect()
}

/// `X_n(f) = Σ_k f(λ_k)`.
pub fn linear_statistic(spectrum: &Spectrum, f: &TestFunction) -> Complex64 {
    spectrum.eigenvalues().iter().map(|&z| f.eval(z)).sum()
}

/// `X_n(f) − n f(0)`, summing `f(λ) − f(0)` termwise.
pub fn centered_statistic(spectrum: &Spectrum, f: &TestFunction) -> Complex64 {
    let f0 = f.at_zero();
    spectrum.eigenvalues().iter().map(|&z| f.eval(z) - f0).sum()
}

/// `tr(z − M)^{-1} − n/z`, evaluated from the spectrum as `Σ λ / (z (z − λ))`.
pub fn resolvent_fluctuation(spectrum: &Spectrum, z: Complex64) -> Result<Complex64, ObservableError> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(ObservableError::ZeroPoint);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for &lambda in spectrum.eigenvalues() {
        let gap = z - lambda;
        let distance = gap.norm();
        if distance < POLE_TOLERANCE {
            return Err(ObservableError::PoleCollision {
                z,
                eigenvalue: lambda,
                distance,
            });
        }
        acc += lambda / gap;
    }
    Ok(acc / z)
}

pub fn resolvent_sample(
    spectrum: &Spectrum,
    grid: &[Complex64],
    replicate_index: u64,
) -> Result<ResolventSample, ObservableError> {
    if let Some(z) = grid.iter().find(|z| z.norm() <= 1.0) {
        return Err(ObservableError::GridPointInsideDisk(*z));
    }
    let values = grid
        .iter()
        .map(|&z| resolvent_fluctuation(spectrum, z))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ResolventSample {
        grid: grid.to_vec(),
        values,
        n: spectrum.n(),
        replicate_index,
    })
}

/// `(1/2πi) ∮ f(z) G_n(z) dz` by the trapezoid rule on the contour nodes.
///
/// With `z = ρe^{iθ}` and `dz = iz dθ` this is the plain average of
/// `z f(z) G_n(z)` over the nodes.
pub fn cauchy_statistic(
    spectrum: &Spectrum,
    f: &TestFunction,
    contour: &Contour,
) -> Result<Complex64, ObservableError> {
    contour.validate()?;
    let offending: Vec<Complex64> = spectrum
        .eigenvalues()
        .iter()
        .copied()
        .filter(|z| z.norm() >= contour.radius - CONTAINMENT_MARGIN)
        .collect();
    if !offending.is_empty() {
        return Err(ObservableError::EigenvalueOutsideContour {
            radius: contour.radius,
            offending,
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for z in contour.nodes() {
        acc += z * f.eval(z) * resolvent_fluctuation(spectrum, z)?;
    }
    Ok(acc / contour.node_count as f64)
}

/// Kolmogorov–Smirnov distance between the empirical law of `|λ|²` and Uniform[0, 1].
pub fn esd_radial_ks(spectrum: &Spectrum) -> Result<f64, ObservableError> {
    let n = spectrum.n();
    if n < 2 {
        return Err(ObservableError::TooFewEigenvalues);
    }
    let mut radii: Vec<f64> = spectrum.eigenvalues().iter().map(|z| z.norm_sqr()).collect();
    radii.sort_by(f64::total_cmp);
    Ok(ks_against_cdf(&radii, |t| t.clamp(0.0, 1.0)))
}

/// Sup-distance between the empirical CDF of sorted `xs` and `cdf`.
pub(crate) fn ks_against_cdf(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = cdf(x);
            ((k as f64 + 1.0) / n - f).max(f - k as f64 / n)
        })
        .fold(0.0, f64::max)
}

pub fn spectral_diagnostics(
    m: &ComplexMatrix,
    spectrum: &Spectrum,
    kappa: f64,
) -> Result<SpectralDiagnostics, ObservableError> {
    if !(kappa > 2.0) {
        return Err(ObservableError::Kappa(kappa));
    }
    let spectral_norm = largest_singular_value(m).into_result()?;
    Ok(SpectralDiagnostics {
        spectral_norm,
        spectral_radius: spectrum.spectral_radius(),
        kappa,
        in_omega: spectral_norm < kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{EntryLaw, LawKind, MatrixSample};
    use crate::linalg::{eigenvalues, trace_power};
    use crate::rng::StreamKey;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spec(values: &[Complex64]) -> Spectrum {
        Spectrum::new(values.to_vec())
    }

    fn ginibre(n: usize, replicate: u64) -> (ComplexMatrix, Spectrum) {
        let sample = MatrixSample::generate(EntryLaw::new(LawKind::ComplexGaussian), n, StreamKey::new(17, replicate)).unwrap();
        let s = eigenvalues(&sample.matrix).unwrap();
        (sample.matrix, s)
    }

    #[test]
    fn test_function_basics() {
        let f = TestFunction::new(vec![c(2.0, 0.0), c(0.0, 1.0), c(3.0, 0.0)]).unwrap();
        assert_eq!(f.at_zero(), c(2.0, 0.0));
        assert_eq!(f.degree(), 2);
        assert_eq!(f.derivative().coefficients(), &[c(0.0, 1.0), c(6.0, 0.0)]);
        assert_eq!(f.eval(c(1.0, 0.0)), c(5.0, 1.0));
        assert_eq!(TestFunction::monomial(2).label(), "z^2");
        assert_eq!(TestFunction::monomial(1).label(), "z");
        assert!(TestFunction::new(vec![]).is_err());
    }

    #[test]
    fn linear_statistic_examples() {
        let s = spec(&[c(0.5, 0.0), c(-0.5, 0.0)]);
        assert_eq!(linear_statistic(&s, &TestFunction::monomial(1)), c(0.0, 0.0));
        assert_eq!(linear_statistic(&s, &TestFunction::monomial(2)), c(0.5, 0.0));
    }

    #[test]
    fn linear_statistic_of_identity_is_trace() {
        let (m, s) = ginibre(32, 0);
        let gap = (linear_statistic(&s, &TestFunction::monomial(1)) - trace_power(&m, 1).unwrap()).norm();
        assert!(gap < 1e-9, "{gap}");
    }

    #[test]
    fn centered_statistic_examples() {
        let s = spec(&[c(0.1, 0.2), c(-0.7, 0.4), c(0.3, -0.9)]);
        let constant = TestFunction::new(vec![c(1.5, -2.0)]).unwrap();
        assert_eq!(centered_statistic(&s, &constant), c(0.0, 0.0));
        assert_eq!(centered_statistic(&s, &TestFunction::monomial(1)), s.sum());
        let single = spec(&[c(0.3, 0.4)]);
        assert_eq!(centered_statistic(&single, &TestFunction::monomial(2)), c(0.3, 0.4) * c(0.3, 0.4));
    }

    #[test]
    fn resolvent_examples() {
        let zero = spec(&[c(0.0, 0.0)]);
        assert_eq!(resolvent_fluctuation(&zero, c(2.0, 1.0)).unwrap(), c(0.0, 0.0));

        let a = c(0.3, 0.2);
        let pair = spec(&[a, -a]);
        let z = c(1.7, -0.4);
        let expected = 2.0 * z / (z * z - a * a) - 2.0 / z;
        assert!((resolvent_fluctuation(&pair, z).unwrap() - expected).norm() < 1e-14);

        assert!(matches!(resolvent_fluctuation(&pair, a), Err(ObservableError::PoleCollision { .. })));
        assert!(matches!(resolvent_fluctuation(&pair, c(0.0, 0.0)), Err(ObservableError::ZeroPoint)));
    }

    #[test]
    fn resolvent_decays_like_inverse_square() {
        let (_, s) = ginibre(16, 1);
        let near = resolvent_fluctuation(&s, c(10.0, 0.0)).unwrap().norm();
        let far = resolvent_fluctuation(&s, c(100.0, 0.0)).unwrap().norm();
        let ratio = near / far;
        assert!((50.0..=200.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn cauchy_single_eigenvalue_by_residues() {
        let s = spec(&[c(0.5, 0.0)]);
        let contour = Contour::new(2.0, 256).unwrap();
        let value = cauchy_statistic(&s, &TestFunction::monomial(1), &contour).unwrap();
        assert!((value - c(0.5, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn cauchy_of_constant_vanishes() {
        let (_, s) = ginibre(8, 2);
        let f = TestFunction::new(vec![c(3.0, 1.0)]).unwrap();
        let value = cauchy_statistic(&s, &f, &Contour::default()).unwrap();
        assert!(value.norm() < 1e-12);
    }

    #[test]
    fn cauchy_matches_centered_statistic() {
        let f = TestFunction::new(vec![c(1.0, 0.0), c(0.5, -0.5), c(0.0, 2.0), c(0.25, 0.0)]).unwrap();
        for r in 0..5 {
            let (_, s) = ginibre(24, 10 + r);
            let direct = centered_statistic(&s, &f);
            let contour = cauchy_statistic(&s, &f, &Contour::default()).unwrap();
            assert!((direct - contour).norm() <= 1e-8 * (1.0 + direct.norm()));
        }
    }

    #[test]
    fn cauchy_rejects_escaped_eigenvalues() {
        let s = spec(&[c(0.0, 0.0), c(3.0, 0.0)]);
        let contour = Contour::new(2.0, 64).unwrap();
        match cauchy_statistic(&s, &TestFunction::monomial(1), &contour) {
            Err(ObservableError::EigenvalueOutsideContour { offending, .. }) => assert_eq!(offending, vec![c(3.0, 0.0)]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn contour_validation() {
        assert!(Contour::new(1.0, 512).is_err());
        assert!(Contour::new(2.0, 63).is_err());
        assert!(Contour::new(2.0, 66).is_ok());
        assert!(Contour::new(2.0, 32).is_err());
    }

    #[test]
    fn ks_point_mass_on_circle() {
        let n = 16;
        let roots: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64)).collect();
        let d = esd_radial_ks(&spec(&roots)).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_midpoint_grid() {
        let n = 40;
        let values: Vec<Complex64> = (1..=n)
            .map(|k| Complex64::from_polar(((k as f64 - 0.5) / n as f64).sqrt(), k as f64))
            .collect();
        let d = esd_radial_ks(&spec(&values)).unwrap();
        assert!((d - 1.0 / (2.0 * n as f64)).abs() < 1e-12, "{d}");
        assert!(esd_radial_ks(&spec(&values[..1])).is_err());
    }

    #[test]
    fn diagnostics_examples() {
        let zero = ComplexMatrix::zeros(3);
        let d = spectral_diagnostics(&zero, &eigenvalues(&zero).unwrap(), 2.5).unwrap();
        assert_eq!((d.spectral_norm, d.spectral_radius, d.in_omega), (0.0, 0.0, true));

        let three = ComplexMatrix::from_real_rows(&[&[3.0]]).unwrap();
        let d = spectral_diagnostics(&three, &eigenvalues(&three).unwrap(), 2.5).unwrap();
        assert!(!d.in_omega);
        assert!(spectral_diagnostics(&three, &eigenvalues(&three).unwrap(), 2.0).is_err());
    }

    #[test]
    fn radius_bounded_by_norm() {
        for r in 0..4 {
            let (m, s) = ginibre(20, 30 + r);
            let d = spectral_diagnostics(&m, &s, 2.5).unwrap();
            assert!(d.spectral_radius <= d.spectral_norm + 1e-8);
        }
    }

    #[test]
    fn default_grid_shape() {
        let grid = default_resolvent_grid();
        assert_eq!(grid.len(), 16);
        assert!(grid.iter().all(|z| z.norm() > 1.0));
        assert!((grid[0] - c(5.0, 0.0)).norm() < 1e-15);
        assert!((grid[8] - c(1.5, 0.0)).norm() < 1e-15);
    }
}

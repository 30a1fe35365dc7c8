//! Gauss–Legendre rules and the tensor-product rule on the unit disk.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

pub const MIN_RADIAL_ORDER: usize = 32;
pub const MIN_ANGULAR_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("disk quadrature needs radial order >= 32 and angular order >= 64 (got {radial}, {angular})")]
pub struct QuadratureOrderError {
    pub radial: usize,
    pub angular: usize,
}

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[-1, 1]`,
/// by Newton iteration on the three-term recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(order, x);
            let step = p / d;
            x -= step;
            if step.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(order, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// Tensor rule for `(1/π) ∫_U h(z) d²z`: Gauss–Legendre in `t = |z|²` on
/// `[0, 1]` times equispaced angles. Polynomials in `z, z̄` of degree below
/// the angular order whose radial part has degree below `2·radial_order` in
/// `t` are integrated exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskQuadrature {
    radial_order: usize,
    angular_order: usize,
    t_nodes: Vec<f64>,
    t_weights: Vec<f64>,
}

impl DiskQuadrature {
    pub fn new(radial_order: usize, angular_order: usize) -> Result<Self, QuadratureOrderError> {
        if radial_order < MIN_RADIAL_ORDER || angular_order < MIN_ANGULAR_ORDER {
            return Err(QuadratureOrderError {
                radial: radial_order,
                angular: angular_order,
            });
        }
        Ok(Self::with_orders_unchecked(radial_order, angular_order))
    }

    /// Bypasses the minimum orders; used for convergence studies and the
    /// coarse-quadrature failure path of the identity checks.
    pub fn with_orders_unchecked(radial_order: usize, angular_order: usize) -> Self {
        let (x, w) = gauss_legendre(radial_order.max(1));
        Self {
            radial_order,
            angular_order: angular_order.max(1),
            t_nodes: x.iter().map(|x| 0.5 * (x + 1.0)).collect(),
            t_weights: w.iter().map(|w| 0.5 * w).collect(),
        }
    }

    pub fn radial_order(&self) -> usize {
        self.radial_order
    }

    pub fn angular_order(&self) -> usize {
        self.angular_order
    }

    /// `(1/π) ∫_U h(z) d²z`. With `d²z = ½ dt dθ` the normalised rule is
    /// `(1/M) Σ_i w_i Σ_j h(√t_i e^{iθ_j})`.
    pub fn average(&self, mut h: impl FnMut(Complex64) -> Complex64) -> Complex64 {
        let m = self.angular_order;
        let mut total = Complex64::new(0.0, 0.0);
        for (&t, &w) in self.t_nodes.iter().zip(&self.t_weights) {
            let r = t.sqrt();
            let ring: Complex64 = (0..m)
                .map(|j| h(Complex64::from_polar(r, TAU * j as f64 / m as f64)))
                .sum();
            total += ring * w;
        }
        total / m as f64
    }
}

impl Default for DiskQuadrature {
    fn default() -> Self {
        Self::with_orders_unchecked(MIN_RADIAL_ORDER, MIN_ANGULAR_ORDER)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(10);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // ∫ x^18 = 2/19 is exact for 10 points.
        let integral: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((integral - 2.0 / 19.0).abs() < 1e-14);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn known_small_rules() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!(x[1].abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn disk_average_of_radial_powers() {
        let q = DiskQuadrature::new(32, 64).unwrap();
        // (1/π) ∫_U |z|^{2k} d²z = 1/(k+1)
        for k in 0..6 {
            let v = q.average(|z| Complex64::new(z.norm_sqr().powi(k), 0.0));
            assert!((v.re - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "k = {k}");
        }
        let v = q.average(|z| z * z.conj().powu(2));
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn rejects_low_orders() {
        assert!(DiskQuadrature::new(31, 64).is_err());
        assert!(DiskQuadrature::new(32, 63).is_err());
    }
}

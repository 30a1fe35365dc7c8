use num_complex::Complex64;

use crate::observables::{Contour, TestFunction};
use crate::oracles::{
    bergman_identity_check, contour_covariance_identity, gaf_covariance_truncated, resolvent_covariance,
    DEFAULT_GAF_TRUNCATION,
};
use crate::quadrature::DiskQuadrature;

pub const BERGMAN_TOLERANCE: f64 = 1e-4;
pub const CONTOUR_TOLERANCE: f64 = 1e-6;
const BERGMAN_RADII: [f64; 3] = [2.0, 3.0, 5.0];
const GAF_RADII: [f64; 5] = [1.5, 2.0, 3.0, 5.0, 10.0];
const CHECK_CONTOUR_RADIUS: f64 = 2.0;
const CHECK_CONTOUR_NODES: usize = 512;
/// Quadrature orders used by `--coarse`, far below the documented minimum.
const COARSE_ORDERS: (usize, usize) = (2, 4);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleCheckOptions {
    pub coarse: bool,
    pub gaf_truncation: usize,
}

impl Default for OracleCheckOptions {
    fn default() -> Self {
        Self {
            coarse: false,
            gaf_truncation: DEFAULT_GAF_TRUNCATION,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleCheckRow {
    pub identity: &'static str,
    pub arguments: String,
    pub gap: f64,
    pub tolerance: f64,
}

impl OracleCheckRow {
    pub fn passes(&self) -> bool {
        self.gap <= self.tolerance
    }
}

fn pt(z: Complex64) -> String {
    format!("{:+.4}{:+.4}i", z.re, z.im)
}

/// Bergman, contour and truncated-GAF identities on the built-in grid.
pub fn run_oracle_check(opts: &OracleCheckOptions) -> Vec<OracleCheckRow> {
    let quad = if opts.coarse {
        DiskQuadrature::with_orders_unchecked(COARSE_ORDERS.0, COARSE_ORDERS.1)
    } else {
        DiskQuadrature::default()
    };
    let mut rows = Vec::new();

    for &a in &BERGMAN_RADII {
        for &b in &BERGMAN_RADII {
            let z = Complex64::from_polar(a, 0.4);
            let w = Complex64::from_polar(b, -1.1);
            let gap = bergman_identity_check(z, w, &quad).map_or(f64::INFINITY, |c| c.gap);
            rows.push(OracleCheckRow {
                identity: "bergman",
                arguments: format!("z={} w={}", pt(z), pt(w)),
                gap,
                tolerance: BERGMAN_TOLERANCE,
            });
        }
    }

    let contour = Contour {
        radius: CHECK_CONTOUR_RADIUS,
        node_count: CHECK_CONTOUR_NODES,
    };
    let functions = [
        TestFunction::monomial(1),
        TestFunction::monomial(2),
        TestFunction::from_real(&[0.0, 1.0, 1.0]).expect("non-empty"),
    ];
    for f in &functions {
        for g in &functions {
            let gap = contour_covariance_identity(f, g, &contour, &quad).map_or(f64::INFINITY, |c| c.gap);
            rows.push(OracleCheckRow {
                identity: "contour",
                arguments: format!("f={} g={} rho={}", f.label(), g.label(), contour.radius),
                gap,
                tolerance: CONTOUR_TOLERANCE,
            });
        }
    }

    for &a in &GAF_RADII {
        for &b in &GAF_RADII {
            let z = Complex64::new(a, 0.0);
            let w = Complex64::new(b, 0.0);
            let (gap, tolerance) = match (
                gaf_covariance_truncated(opts.gaf_truncation, z, w),
                resolvent_covariance(z, w),
            ) {
                (Ok(t), Ok(exact)) => ((t.partial - exact).norm(), t.tail_bound),
                _ => (f64::INFINITY, 0.0),
            };
            rows.push(OracleCheckRow {
                identity: "gaf",
                arguments: format!("K={} z={} w={}", opts.gaf_truncation, pt(z), pt(w)),
                gap,
                tolerance,
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_passes() {
        let rows = run_oracle_check(&OracleCheckOptions::default());
        assert_eq!(rows.len(), 9 + 9 + 25);
        for r in &rows {
            assert!(r.passes(), "{r:?}");
        }
    }

    #[test]
    fn coarse_quadrature_fails_bergman() {
        let rows = run_oracle_check(&OracleCheckOptions {
            coarse: true,
            ..Default::default()
        });
        assert!(rows.iter().any(|r| r.identity == "bergman" && !r.passes()));
    }

    #[test]
    fn single_term_series_is_honest() {
        let rows = run_oracle_check(&OracleCheckOptions {
            coarse: false,
            gaf_truncation: 1,
        });
        let gaf: Vec<_> = rows.iter().filter(|r| r.identity == "gaf").collect();
        assert!(gaf.iter().all(|r| r.passes()));
        let diag = gaf
            .iter()
            .find(|r| r.arguments == "K=1 z=+2.0000+0.0000i w=+2.0000+0.0000i")
            .unwrap();
        assert!((diag.gap - 7.0 / 144.0).abs() < 1e-15, "{}", diag.gap);
    }
}

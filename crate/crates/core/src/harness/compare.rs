use num_complex::Complex64;

use super::{EstimateReport, ExperimentConfig, TRACE_POWERS};
use crate::oracles::{limit_covariance_closed, limit_covariance_monomials, resolvent_covariance};

/// Absolute allowance added to mean bands once `n ≥ 256`.
pub const BIAS_ALLOWANCE: f64 = 0.01;
pub const Z_SCORE_FLAG: f64 = 4.0;
/// Grid points at or inside this radius are outside the proven regime.
const THEOREM_RADIUS: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantityKind {
    Mean,
    Covariance,
    PseudoCovariance,
}

impl QuantityKind {
    pub fn name(self) -> &'static str {
        match self {
            QuantityKind::Mean => "mean",
            QuantityKind::Covariance => "covariance",
            QuantityKind::PseudoCovariance => "pseudo-covariance",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Theorem,
    Exploratory,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Theorem => "theorem",
            Regime::Exploratory => "exploratory",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeviationRow {
    pub quantity: String,
    pub kind: QuantityKind,
    pub empirical: Complex64,
    pub theory: Complex64,
    pub deviation: f64,
    pub standard_error: f64,
    pub allowance: f64,
    pub z_score: f64,
    pub regime: Regime,
}

impl DeviationRow {
    fn new(
        quantity: String,
        kind: QuantityKind,
        empirical: Complex64,
        theory: Complex64,
        standard_error: f64,
        allowance: f64,
        regime: Regime,
    ) -> Self {
        let deviation = (empirical - theory).norm();
        let excess = (deviation - allowance).max(0.0);
        let z_score = if excess == 0.0 {
            0.0
        } else if standard_error > 0.0 {
            excess / standard_error
        } else {
            f64::INFINITY
        };
        Self {
            quantity,
            kind,
            empirical,
            theory,
            deviation,
            standard_error,
            allowance,
            z_score,
            regime,
        }
    }

    pub fn flagged(&self) -> bool {
        self.z_score > Z_SCORE_FLAG
    }
}

fn point_label(z: Complex64) -> String {
    format!("G({:+.4}{:+.4}i)", z.re, z.im)
}

/// Deviation table for one dimension. The report's coordinates must be the
/// configured functions, then the grid, then `tr M^s` for `s = 1..=4`.
pub fn compare_to_theory(report: &EstimateReport, cfg: &ExperimentConfig, n: usize) -> Vec<DeviationRow> {
    let nf = cfg.functions.len();
    let ng = cfg.z_grid.len();
    let nt = TRACE_POWERS as usize;
    assert_eq!(report.dim, nf + ng + nt, "report does not match the configuration");
    let zero = Complex64::new(0.0, 0.0);
    let allowance = if n >= 256 { BIAS_ALLOWANCE } else { 0.0 };

    let f_label = |i: usize| format!("X({})", cfg.functions[i].label());
    let t_label = |s: usize| format!("trM^{s}");
    let mut rows = Vec::new();

    let mean_row = |rows: &mut Vec<DeviationRow>, idx: usize, label: String, regime: Regime| {
        rows.push(DeviationRow::new(
            label,
            QuantityKind::Mean,
            report.mean[idx],
            zero,
            report.mean_se[idx],
            allowance,
            regime,
        ));
    };
    let second_rows = |rows: &mut Vec<DeviationRow>, i: usize, j: usize, label: String, theory: Complex64, regime| {
        rows.push(DeviationRow::new(
            label.clone(),
            QuantityKind::Covariance,
            report.cov(i, j),
            theory,
            report.cov_se(i, j),
            0.0,
            regime,
        ));
        rows.push(DeviationRow::new(
            label,
            QuantityKind::PseudoCovariance,
            report.pseudo(i, j),
            zero,
            report.pseudo_se(i, j),
            0.0,
            regime,
        ));
    };

    for i in 0..nf {
        mean_row(&mut rows, i, f_label(i), Regime::Theorem);
    }
    for (k, &z) in cfg.z_grid.iter().enumerate() {
        let regime = if z.norm() > THEOREM_RADIUS { Regime::Theorem } else { Regime::Exploratory };
        mean_row(&mut rows, nf + k, point_label(z), regime);
    }
    for s in 0..nt {
        mean_row(&mut rows, nf + ng + s, t_label(s + 1), Regime::Theorem);
    }

    for i in 0..nf {
        for j in i..nf {
            let theory = limit_covariance_closed(&cfg.functions[i], &cfg.functions[j]);
            let label = format!("{},{}", f_label(i), f_label(j));
            second_rows(&mut rows, i, j, label, theory, Regime::Theorem);
        }
    }
    for a in 0..ng {
        for b in a..ng {
            let (z, w) = (cfg.z_grid[a], cfg.z_grid[b]);
            // Grid points are validated to lie outside the unit disk.
            let theory = resolvent_covariance(z, w).expect("grid point inside the unit disk");
            let regime = if z.norm().min(w.norm()) > THEOREM_RADIUS {
                Regime::Theorem
            } else {
                Regime::Exploratory
            };
            let label = format!("{},{}", point_label(z), point_label(w));
            second_rows(&mut rows, nf + a, nf + b, label, theory, regime);
        }
    }
    for s in 0..nt {
        let idx = nf + ng + s;
        let m = s as u32 + 1;
        let theory = Complex64::new(limit_covariance_monomials(m, m), 0.0);
        second_rows(&mut rows, idx, idx, format!("{0},{0}", t_label(s + 1)), theory, Regime::Theorem);
    }
    rows
}

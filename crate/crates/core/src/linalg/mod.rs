//! Dense complex matrices and the spectral kernels built on them.

mod eigen;
mod hessenberg;
mod matrix;
mod norm;
mod trace;

pub use eigen::eigenvalues;
pub use hessenberg::{balance, hessenberg_reduce};
pub use matrix::{matching_distance, ComplexMatrix, Spectrum};
pub use norm::{largest_singular_value, SingularValueEstimate, POWER_ITERATION_BUDGET};
pub use trace::{trace_power, trace_powers, MAX_TRACE_POWER};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix must have at least one row")]
    Empty,
    #[error("expected {expected} entries, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("QR iteration did not converge: {stuck_size}x{stuck_size} block still coupled after {iterations} sweeps")]
    NonConvergence { stuck_size: usize, iterations: usize },
    #[error("power iteration did not converge after {iterations} steps (best estimate {best})")]
    NormNonConvergence { best: f64, iterations: usize },
    #[error("trace power {0} outside 1..=8")]
    InvalidPower(u32),
}

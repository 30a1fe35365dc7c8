//! Monte Carlo laboratory for the fluctuations of linear spectral statistics
//! of non-Hermitian i.i.d. random matrices.
//!
//! The crate samples `M = M̃/√n` for several entry laws, computes full complex
//! spectra with a Hessenberg/QR eigensolver, evaluates centered linear
//! statistics and the centered resolvent trace, and compares their empirical
//! moments against closed-form limit covariances.

mod complex_serde;
pub mod ensembles;
pub mod harness;
pub mod linalg;
pub mod observables;
pub mod oracles;
pub mod quadrature;
pub mod report;
pub mod rng;

pub use num_complex::Complex64;

/// Version string recorded in every persisted file.
pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), "/", env!("CARGO_PKG_VERSION"));

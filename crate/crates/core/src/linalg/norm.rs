use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError};

/// Iteration cap for the power method on `A^* A`.
pub const POWER_ITERATION_BUDGET: usize = 20_000;
/// Stopping threshold on the relative change of the Rayleigh quotient of
/// `A^* A` between successive iterates.
const RAYLEIGH_TOLERANCE: f64 = 1e-12;

/// Outcome of the power method; `converged` is false when the budget ran out
/// and `value` is the best iterate seen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularValueEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl SingularValueEstimate {
    pub fn into_result(self) -> Result<f64, LinalgError> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(LinalgError::NormNonConvergence {
                best: self.value,
                iterations: self.iterations,
            })
        }
    }
}

/// Spectral norm `‖a‖₂` by power iteration on `a^* a`.
pub fn largest_singular_value(a: &ComplexMatrix) -> SingularValueEstimate {
    let n = a.n();
    // Fixed, non-degenerate starting direction so results are reproducible.
    let golden = 0.618_033_988_749_894_9_f64;
    let scale = 1.0 / (n as f64).sqrt();
    let mut v: Vec<Complex64> = (0..n)
        .map(|j| {
            let phase = std::f64::consts::TAU * ((j as f64 + 1.0) * golden).fract();
            Complex64::from_polar(scale, phase)
        })
        .collect();
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut u = vec![Complex64::new(0.0, 0.0); n];

    let mut previous = f64::NAN;
    let mut best = 0.0_f64;
    for iteration in 1..=POWER_ITERATION_BUDGET {
        a.matvec(&v, &mut w);
        let rayleigh: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        best = best.max(rayleigh);
        if rayleigh == 0.0 {
            // v lies in the null space; only possible for a = 0 given a
            // generic start, otherwise it is an exact zero of A^*A anyway.
            if a.as_slice().iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
                return SingularValueEstimate {
                    value: 0.0,
                    iterations: iteration,
                    converged: true,
                };
            }
        }
        if (rayleigh - previous).abs() <= RAYLEIGH_TOLERANCE * rayleigh {
            return SingularValueEstimate {
                value: rayleigh.sqrt(),
                iterations: iteration,
                converged: true,
            };
        }
        previous = rayleigh;
        a.adjoint_matvec(&w, &mut u);
        let norm = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        for (vi, ui) in v.iter_mut().zip(&u) {
            *vi = ui / norm;
        }
    }
    SingularValueEstimate {
        value: best.sqrt(),
        iterations: POWER_ITERATION_BUDGET,
        converged: false,
    }
}

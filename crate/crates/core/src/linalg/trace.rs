use num_complex::Complex64;

use super::{ComplexMatrix, LinalgError};

pub const MAX_TRACE_POWER: u32 = 8;

/// `tr(a^p)` for `1 <= p <= 8` from explicit matrix products.
pub fn trace_power(a: &ComplexMatrix, p: u32) -> Result<Complex64, LinalgError> {
    if !(1..=MAX_TRACE_POWER).contains(&p) {
        return Err(LinalgError::InvalidPower(p));
    }
    Ok(*trace_powers(a, p)?.last().expect("p >= 1"))
}

/// `[tr a, tr a^2, ..., tr a^max_power]`, sharing the intermediate powers.
pub fn trace_powers(a: &ComplexMatrix, max_power: u32) -> Result<Vec<Complex64>, LinalgError> {
    if !(1..=MAX_TRACE_POWER).contains(&max_power) {
        return Err(LinalgError::InvalidPower(max_power));
    }
    // powers[k] holds a^(k+1) for k + 1 <= ceil(max_power / 2).
    let half = max_power.div_ceil(2) as usize;
    let mut powers = vec![a.clone()];
    while powers.len() < half {
        let next = powers.last().unwrap().matmul(a);
        powers.push(next);
    }
    let mut traces = vec![a.trace()];
    for p in 2..=max_power as usize {
        let lo = p / 2;
        let hi = p - lo;
        traces.push(trace_of_product(&powers[lo - 1], &powers[hi - 1]));
    }
    Ok(traces)
}

/// `tr(x y) = Σ_ij x_ij y_ji`.
fn trace_of_product(x: &ComplexMatrix, y: &ComplexMatrix) -> Complex64 {
    let n = x.n();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let row = x.row(i);
        for (j, xij) in row.iter().enumerate() {
            acc += xij * y[(j, i)];
        }
    }
    acc
}

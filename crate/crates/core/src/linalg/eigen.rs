use num_complex::Complex64;

use super::hessenberg::{abs1, balance, hessenberg_in_place};
use super::{ComplexMatrix, LinalgError, Spectrum};

/// Stalled iterations between exceptional shifts.
const EXCEPTIONAL_SHIFT_PERIOD: usize = 10;
/// Total sweep budget per unit of dimension.
const SWEEPS_PER_DIMENSION: usize = 30;

/// Eigenvalues of a dense complex matrix.
///
/// Balancing, Householder reduction to Hessenberg form, then implicit
/// single-shift QR with a Wilkinson shift. Only the active diagonal window is
/// updated since no Schur vectors are needed.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Spectrum, LinalgError> {
    let n = a.n();
    if n == 1 {
        return Ok(Spectrum::new(vec![a[(0, 0)]]));
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg_in_place(&mut h);
    let values = hessenberg_qr(&mut h)?;
    Ok(Spectrum::new(values))
}

/// Complex Givens rotation `[c s; -conj(s) c]` with real `c`.
#[derive(Clone, Copy, Debug)]
struct Rotation {
    c: f64,
    s: Complex64,
}

impl Rotation {
    /// Rotation mapping `(a, b)` to `(r, 0)`.
    fn zeroing(a: Complex64, b: Complex64) -> (Self, Complex64) {
        let b_abs = b.norm();
        if b_abs == 0.0 {
            return (
                Self {
                    c: 1.0,
                    s: Complex64::new(0.0, 0.0),
                },
                a,
            );
        }
        let a_abs = a.norm();
        if a_abs == 0.0 {
            return (
                Self {
                    c: 0.0,
                    s: b.conj() / b_abs,
                },
                Complex64::new(b_abs, 0.0),
            );
        }
        let norm = a_abs.hypot(b_abs);
        let phase = a / a_abs;
        (
            Self {
                c: a_abs / norm,
                s: phase * b.conj() / norm,
            },
            phase * norm,
        )
    }

    #[inline]
    fn apply_left(&self, x: &mut Complex64, y: &mut Complex64) {
        let (xv, yv) = (*x, *y);
        *x = xv * self.c + self.s * yv;
        *y = -self.s.conj() * xv + yv * self.c;
    }

    /// Right multiplication by the adjoint, acting on a pair of columns.
    #[inline]
    fn apply_right_adjoint(&self, x: &mut Complex64, y: &mut Complex64) {
        let (xv, yv) = (*x, *y);
        *x = xv * self.c + yv * self.s.conj();
        *y = -xv * self.s + yv * self.c;
    }
}

fn eig22(a00: Complex64, a01: Complex64, a10: Complex64, a11: Complex64) -> (Complex64, Complex64) {
    let scale = abs1(a00) + abs1(a01) + abs1(a10) + abs1(a11);
    if scale == 0.0 {
        return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    }
    let (a00, a01, a10, a11) = (a00 / scale, a01 / scale, a10 / scale, a11 / scale);
    let half_tr = (a00 + a11) * 0.5;
    let disc = ((a00 - half_tr) * (a00 - half_tr) + a01 * a10).sqrt();
    ((half_tr + disc) * scale, (half_tr - disc) * scale)
}

/// Runs the shifted QR iteration on an upper Hessenberg matrix, destroying it.
fn hessenberg_qr(h: &mut ComplexMatrix) -> Result<Vec<Complex64>, LinalgError> {
    let n = h.n();
    let eps = f64::EPSILON;
    let small = f64::MIN_POSITIVE / eps;
    let budget = SWEEPS_PER_DIMENSION * n;
    let mut values = Vec::with_capacity(n);

    let mut istop = n;
    let mut istart = 0;
    let mut stalled = 0usize;
    let mut sweeps = 0usize;

    while istop > 0 {
        // Look for a negligible subdiagonal entry inside the active window.
        for i in (istart + 1..istop).rev() {
            let sub = abs1(h[(i, i - 1)]);
            let mut tst = abs1(h[(i - 1, i - 1)]) + abs1(h[(i, i)]);
            if tst == 0.0 {
                if i >= 2 {
                    tst += abs1(h[(i - 1, i - 2)]);
                }
                if i + 1 < n {
                    tst += abs1(h[(i + 1, i)]);
                }
            }
            if sub <= small || sub <= eps * tst {
                h[(i, i - 1)] = Complex64::new(0.0, 0.0);
                istart = i;
                break;
            }
        }

        let size = istop - istart;
        if size <= 2 {
            if size == 1 {
                values.push(h[(istart, istart)]);
            } else {
                let (l1, l2) = eig22(
                    h[(istart, istart)],
                    h[(istart, istart + 1)],
                    h[(istart + 1, istart)],
                    h[(istart + 1, istart + 1)],
                );
                values.push(l1);
                values.push(l2);
            }
            istop = istart;
            istart = 0;
            stalled = 0;
            continue;
        }

        if sweeps == budget {
            return Err(LinalgError::NonConvergence {
                stuck_size: size,
                iterations: sweeps,
            });
        }
        sweeps += 1;
        stalled += 1;

        let last = istop - 1;
        let shift = if stalled.is_multiple_of(EXCEPTIONAL_SHIFT_PERIOD) {
            let mut s = h[(last, last - 1)].norm();
            if last >= istart + 2 {
                s += h[(last - 1, last - 2)].norm();
            }
            let a00 = Complex64::new(0.75 * s, 0.0) + h[(last, last)];
            let (s1, s2) = eig22(a00, Complex64::new(s, 0.0), Complex64::new(-0.4375 * s, 0.0), a00);
            closer_to(s1, s2, h[(last, last)])
        } else {
            let (s1, s2) = eig22(
                h[(last - 1, last - 1)],
                h[(last - 1, last)],
                h[(last, last - 1)],
                h[(last, last)],
            );
            closer_to(s1, s2, h[(last, last)])
        };

        single_shift_sweep(h, istart, istop, shift);
    }
    Ok(values)
}

fn closer_to(s1: Complex64, s2: Complex64, target: Complex64) -> Complex64 {
    if abs1(s1 - target) <= abs1(s2 - target) {
        s1
    } else {
        s2
    }
}

/// One implicit single-shift QR sweep on the window `istart..istop`.
fn single_shift_sweep(h: &mut ComplexMatrix, istart: usize, istop: usize, shift: Complex64) {
    let n = h.n();
    for i in istart..istop - 1 {
        let rot = if i == istart {
            Rotation::zeroing(h[(i, i)] - shift, h[(i + 1, i)]).0
        } else {
            let (rot, r) = Rotation::zeroing(h[(i, i - 1)], h[(i + 1, i - 1)]);
            h[(i, i - 1)] = r;
            h[(i + 1, i - 1)] = Complex64::new(0.0, 0.0);
            rot
        };

        // Rows i and i+1, columns i..istop.
        {
            let data = h.data_mut();
            let (upper, lower) = data.split_at_mut((i + 1) * n);
            let row_i = &mut upper[i * n + i..i * n + istop];
            let row_j = &mut lower[i..istop];
            for (x, y) in row_i.iter_mut().zip(row_j.iter_mut()) {
                rot.apply_left(x, y);
            }
        }

        // Columns i and i+1, rows istart..min(i+3, istop).
        let row_end = (i + 3).min(istop);
        let data = h.data_mut();
        for r in istart..row_end {
            let base = r * n + i;
            let (x, y) = data[base..base + 2].split_at_mut(1);
            rot.apply_right_adjoint(&mut x[0], &mut y[0]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matching_distance;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn nilpotent() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let s = eigenvalues(&a).unwrap();
        for z in s.eigenvalues() {
            assert!(z.norm() < 1e-15);
        }
    }

    #[test]
    fn rotation_generator() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).unwrap();
        let s = eigenvalues(&a).unwrap();
        assert!(matching_distance(s.eigenvalues(), &[c(0.0, 1.0), c(0.0, -1.0)]) < 1e-14);
    }

    #[test]
    fn cube_roots_of_unity() {
        // z^3 - 1
        let a = ComplexMatrix::companion(&[c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let s = eigenvalues(&a).unwrap();
        let h = 3f64.sqrt() / 2.0;
        let expected = [c(-0.5, -h), c(-0.5, h), c(1.0, 0.0)];
        assert!(matching_distance(s.eigenvalues(), &expected) < 1e-10, "{:?}", s.eigenvalues());
    }

    #[test]
    fn single_entry() {
        let a = ComplexMatrix::from_rows(&[vec![c(0.3, -0.2)]]).unwrap();
        assert_eq!(eigenvalues(&a).unwrap().eigenvalues(), &[c(0.3, -0.2)]);
    }

    #[test]
    fn triangular_recovers_diagonal() {
        let mut a = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0), c(0.5, 0.5)]);
        a[(0, 3)] = c(4.0, 1.0);
        a[(1, 2)] = c(-2.0, 0.0);
        let s = eigenvalues(&a).unwrap();
        let expected = Spectrum::new(vec![c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0), c(0.5, 0.5)]);
        assert!(matching_distance(s.eigenvalues(), expected.eigenvalues()) < 1e-12);
    }

    #[test]
    fn zero_matrix() {
        let s = eigenvalues(&ComplexMatrix::zeros(5)).unwrap();
        assert!(s.eigenvalues().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn givens_zeroes_second_component() {
        let (rot, r) = Rotation::zeroing(c(1.0, 2.0), c(-0.5, 3.0));
        let mut x = c(1.0, 2.0);
        let mut y = c(-0.5, 3.0);
        rot.apply_left(&mut x, &mut y);
        assert!(y.norm() < 1e-15);
        assert!((x - r).norm() < 1e-14);
    }
}

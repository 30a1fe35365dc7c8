use num_complex::Complex64;

use super::ComplexMatrix;

const RADIX: f64 = 2.0;

/// Diagonal similarity scaling by powers of two so that row and column
/// off-diagonal norms are comparable. Exact in floating point.
pub fn balance(a: &mut ComplexMatrix) {
    let n = a.n();
    if n < 2 {
        return;
    }
    let sqr_radix = RADIX * RADIX;
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += abs1(a[(j, i)]);
                    row += abs1(a[(i, j)]);
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let total = col + row;
            let mut f = 1.0;
            let mut c = col;
            let g = row / RADIX;
            while c < g && f < 1e150 {
                f *= RADIX;
                c *= sqr_radix;
            }
            let g = row * RADIX;
            while c > g && f > 1e-150 {
                f /= RADIX;
                c /= sqr_radix;
            }
            if (c + row) / f < 0.95 * total {
                converged = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= inv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// Reduces `a` to upper Hessenberg form by Householder similarity transforms.
///
/// The result is unitarily similar to `a`; entries below the first
/// subdiagonal are set to exact zeros.
pub fn hessenberg_reduce(a: &ComplexMatrix) -> ComplexMatrix {
    let mut h = a.clone();
    hessenberg_in_place(&mut h);
    h
}

pub(crate) fn hessenberg_in_place(h: &mut ComplexMatrix) {
    let n = h.n();
    if n < 3 {
        return;
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n];
    let mut s = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n - 2 {
        let m = n - k - 1;
        let tail_sq: f64 = (k + 2..n).map(|i| h[(i, k)].norm_sqr()).sum();
        if tail_sq == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let x_norm = (tail_sq + x0.norm_sqr()).sqrt();
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * x_norm;
        let v = &mut v[..m];
        v[0] = x0 - alpha;
        for i in 1..m {
            v[i] = h[(k + 1 + i, k)];
        }
        let v_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let beta = 2.0 / v_sq;

        // Left: rows k+1..n, columns k..n.
        let s = &mut s[..n - k];
        s.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        {
            let data = h.as_slice();
            for (i, vi) in v.iter().enumerate() {
                let row = &data[(k + 1 + i) * n + k..(k + 2 + i) * n];
                let cv = vi.conj();
                for (sj, a) in s.iter_mut().zip(row) {
                    *sj += cv * a;
                }
            }
        }
        {
            let data = h.data_mut();
            for (i, vi) in v.iter().enumerate() {
                let scale = *vi * beta;
                let row = &mut data[(k + 1 + i) * n + k..(k + 2 + i) * n];
                for (a, sj) in row.iter_mut().zip(s.iter()) {
                    *a -= scale * sj;
                }
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }

        // Right: all rows, columns k+1..n.
        let data = h.data_mut();
        for r in 0..n {
            let row = &mut data[r * n + k + 1..(r + 1) * n];
            let t: Complex64 = row.iter().zip(v.iter()).map(|(a, vi)| a * vi).sum();
            let t = t * beta;
            for (a, vi) in row.iter_mut().zip(v.iter()) {
                *a -= t * vi.conj();
            }
        }
    }
}

#[inline]
pub(crate) fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

use std::cmp::Ordering;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use super::LinalgError;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting non-square or non-finite input.
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if n == 0 {
            return Err(LinalgError::Empty);
        }
        if data.len() != n * n {
            return Err(LinalgError::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(LinalgError::NonFinite {
                row: pos / n,
                col: pos % n,
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(LinalgError::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(n, data)
    }

    /// Real-valued convenience constructor used heavily in tests.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self, LinalgError> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Companion matrix of the monic polynomial `z^d + c[d-1] z^{d-1} + ... + c[0]`.
    pub fn companion(lower_coefficients: &[Complex64]) -> Result<Self, LinalgError> {
        let d = lower_coefficients.len();
        if d == 0 {
            return Err(LinalgError::Empty);
        }
        let mut m = Self::zeros(d);
        for j in 0..d {
            m[(0, j)] = -lower_coefficients[d - 1 - j];
        }
        for i in 1..d {
            m[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    pub fn conj_transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Row-major `i-k-j` product.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matmul dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.n;
        for (i, yi) in y.iter_mut().enumerate().take(n) {
            *yi = self.data[i * n..(i + 1) * n]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum();
        }
    }

    /// `y = A^* x`, computed row-wise so the inner loop stays contiguous.
    pub fn adjoint_matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.n;
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (i, xi) in x.iter().enumerate().take(n) {
            let row = &self.data[i * n..(i + 1) * n];
            for (yj, a) in y.iter_mut().zip(row) {
                *yj += a.conj() * xi;
            }
        }
    }

    /// Applies `P^T A P` for the permutation `perm` (new index `i` takes old index `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.n;
        assert_eq!(perm.len(), n);
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(perm[i], perm[j])];
            }
        }
        out
    }

    /// Returns true when every entry below the first subdiagonal is exactly zero.
    pub fn is_upper_hessenberg(&self) -> bool {
        (0..self.n).all(|i| (0..i.saturating_sub(1)).all(|j| self[(i, j)] == Complex64::new(0.0, 0.0)))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalue multiset of a square matrix, kept in lexicographic (re, im) order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<Complex64>) -> Self {
        eigenvalues.sort_by(canonical_order);
        Self { eigenvalues }
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn sum(&self) -> Complex64 {
        self.eigenvalues.iter().sum()
    }

    pub fn power_sum(&self, p: u32) -> Complex64 {
        self.eigenvalues.iter().map(|z| z.powu(p)).sum()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Largest distance in a greedy nearest-neighbour matching of two equally
/// sized multisets. Adequate when the points are well separated relative to
/// the distances being measured.
pub fn matching_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets differ in size");
    let mut unused: Vec<Complex64> = b.to_vec();
    let mut worst = 0.0_f64;
    for z in a {
        let (pos, d) = unused
            .iter()
            .enumerate()
            .map(|(i, w)| (i, (z - w).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty");
        worst = worst.max(d);
        unused.swap_remove(pos);
    }
    worst
}

fn canonical_order(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            ComplexMatrix::from_row_major(2, vec![c(0.0, 0.0); 3]),
            Err(LinalgError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            ComplexMatrix::from_row_major(1, vec![c(f64::NAN, 0.0)]),
            Err(LinalgError::NonFinite { row: 0, col: 0 })
        ));
        assert!(matches!(ComplexMatrix::from_row_major(0, vec![]), Err(LinalgError::Empty)));
    }

    #[test]
    fn spectrum_is_canonically_ordered() {
        let s = Spectrum::new(vec![c(1.0, -1.0), c(-2.0, 0.0), c(1.0, -3.0)]);
        assert_eq!(s.eigenvalues(), &[c(-2.0, 0.0), c(1.0, -3.0), c(1.0, -1.0)]);
    }

    #[test]
    fn companion_layout() {
        // z^2 - 3z + 2
        let m = ComplexMatrix::companion(&[c(2.0, 0.0), c(-3.0, 0.0)]).unwrap();
        assert_eq!(m[(0, 0)], c(3.0, 0.0));
        assert_eq!(m[(0, 1)], c(-2.0, 0.0));
        assert_eq!(m[(1, 0)], c(1.0, 0.0));
        assert_eq!(m.trace(), c(3.0, 0.0));
    }

    #[test]
    fn adjoint_matvec_matches_explicit_adjoint() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(0.5, -1.0)],
            vec![c(-3.0, 0.0), c(0.0, 1.0)],
        ])
        .unwrap();
        let x = [c(1.0, 1.0), c(2.0, -0.5)];
        let mut y1 = [c(0.0, 0.0); 2];
        let mut y2 = [c(0.0, 0.0); 2];
        m.adjoint_matvec(&x, &mut y1);
        m.conj_transpose().matvec(&x, &mut y2);
        for (a, b) in y1.iter().zip(&y2) {
            assert!((a - b).norm() < 1e-15);
        }
    }
}

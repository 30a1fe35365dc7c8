use num_complex::Complex64;

/// Sample skewness and excess kurtosis of one real coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoordinateShape {
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// First and second moments of a sample of complex vectors.
///
/// Matrices are `dim × dim`, row-major. Standard errors of second-moment
/// entries use the spread of the per-sample products, so they stay honest for
/// non-Gaussian inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub replicates: usize,
    pub dim: usize,
    pub mean: Vec<Complex64>,
    /// Standard error of each complex mean, `sqrt(Ĉ_ii / R)`.
    pub mean_se: Vec<f64>,
    /// Conjugate covariance `Ĉ_ij`, Hermitian by construction.
    pub covariance: Vec<Complex64>,
    pub covariance_se: Vec<f64>,
    /// Pseudo-covariance `P̂_ij` (no conjugation), symmetric.
    pub pseudo_covariance: Vec<Complex64>,
    pub pseudo_covariance_se: Vec<f64>,
    pub real_shape: Vec<CoordinateShape>,
    pub imag_shape: Vec<CoordinateShape>,
}

impl EstimateReport {
    pub fn cov(&self, i: usize, j: usize) -> Complex64 {
        self.covariance[i * self.dim + j]
    }

    pub fn cov_se(&self, i: usize, j: usize) -> f64 {
        self.covariance_se[i * self.dim + j]
    }

    pub fn pseudo(&self, i: usize, j: usize) -> Complex64 {
        self.pseudo_covariance[i * self.dim + j]
    }

    pub fn pseudo_se(&self, i: usize, j: usize) -> f64 {
        self.pseudo_covariance_se[i * self.dim + j]
    }
}

/// Means, covariances with `(R − 1)` denominators and shape moments.
///
/// Panics when fewer than two samples are given or when sample lengths differ.
pub fn estimate_moments(samples: &[Vec<Complex64>]) -> EstimateReport {
    let r = samples.len();
    assert!(r >= 2, "estimate_moments needs at least two samples");
    let dim = samples[0].len();
    assert!(samples.iter().all(|s| s.len() == dim), "ragged samples");
    let rf = r as f64;

    let mut mean = vec![Complex64::new(0.0, 0.0); dim];
    for s in samples {
        for (m, x) in mean.iter_mut().zip(s) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= rf);

    let centered: Vec<Vec<Complex64>> = samples
        .iter()
        .map(|s| s.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();

    let zero = Complex64::new(0.0, 0.0);
    let mut covariance = vec![zero; dim * dim];
    let mut pseudo_covariance = vec![zero; dim * dim];
    let mut covariance_se = vec![0.0; dim * dim];
    let mut pseudo_covariance_se = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let mut c = zero;
            let mut p = zero;
            for y in &centered {
                c += y[i] * y[j].conj();
                p += y[i] * y[j];
            }
            c /= rf - 1.0;
            p /= rf - 1.0;
            if i == j {
                c.im = 0.0;
            }
            let (mut sc, mut sp) = (0.0, 0.0);
            for y in &centered {
                sc += (y[i] * y[j].conj() - c).norm_sqr();
                sp += (y[i] * y[j] - p).norm_sqr();
            }
            let se_c = (sc / (rf - 1.0) / rf).sqrt();
            let se_p = (sp / (rf - 1.0) / rf).sqrt();
            covariance[i * dim + j] = c;
            covariance[j * dim + i] = c.conj();
            pseudo_covariance[i * dim + j] = p;
            pseudo_covariance[j * dim + i] = p;
            covariance_se[i * dim + j] = se_c;
            covariance_se[j * dim + i] = se_c;
            pseudo_covariance_se[i * dim + j] = se_p;
            pseudo_covariance_se[j * dim + i] = se_p;
        }
    }

    let mean_se = (0..dim).map(|i| (covariance[i * dim + i].re / rf).sqrt()).collect();
    let real_shape = (0..dim)
        .map(|i| shape(centered.iter().map(|y| y[i].re)))
        .collect();
    let imag_shape = (0..dim)
        .map(|i| shape(centered.iter().map(|y| y[i].im)))
        .collect();

    EstimateReport {
        replicates: r,
        dim,
        mean,
        mean_se,
        covariance,
        covariance_se,
        pseudo_covariance,
        pseudo_covariance_se,
        real_shape,
        imag_shape,
    }
}

/// Moment-ratio skewness and excess kurtosis of an already centered sample.
/// A degenerate (constant) coordinate reports zeros.
pub(crate) fn shape(centered: impl Iterator<Item = f64> + Clone) -> CoordinateShape {
    let n = centered.clone().count() as f64;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for y in centered {
        let y2 = y * y;
        m2 += y2;
        m3 += y2 * y;
        m4 += y2 * y2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 <= 0.0 {
        return CoordinateShape {
            skewness: 0.0,
            excess_kurtosis: 0.0,
        };
    }
    CoordinateShape {
        skewness: m3 / m2.powf(1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
    }
}

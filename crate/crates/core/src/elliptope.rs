//! Correlation matrices (the elliptope ℰ_n) and their unit-vector Gram factors.
//!
//! Convention: B_ij = ⟨e_i, e_j⟩ with ⟨x, y⟩ = Σ_k x_k·conj(y_k).

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{complex_gaussian, inner, vec_norm, Matrix};

pub const PSD_TOL: f64 = 1e-10;
pub const DIAGONAL_TOL: f64 = 1e-10;
const UNIT_TOL: f64 = 1e-12;

/// n unit vectors in ℂ^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramFactor {
    vectors: Vec<Vec<Complex64>>,
}

impl GramFactor {
    pub fn new(vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = vectors.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("empty Gram factor".into()));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != n {
                return Err(Error::DimensionMismatch(format!("vector {i} has length {}, expected {n}", v.len())));
            }
            let norm = vec_norm(v);
            if (norm - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidArgument(format!("vector {i} has norm {norm}")));
            }
        }
        Ok(Self { vectors })
    }

    /// Standard basis; its correlation matrix is the identity.
    pub fn standard(n: usize) -> Self {
        let vectors = (0..n)
            .map(|i| {
                let mut v = vec![Complex64::new(0.0, 0.0); n];
                v[i] = Complex64::new(1.0, 0.0);
                v
            })
            .collect();
        Self { vectors }
    }

    /// n i.i.d. normalized complex Gaussian vectors.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let vectors = (0..n)
            .map(|_| {
                let v: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
                let norm = vec_norm(&v);
                v.into_iter().map(|z| z / norm).collect()
            })
            .collect();
        Self { vectors }
    }

    pub(crate) fn from_unchecked(vectors: Vec<Vec<Complex64>>) -> Self {
        Self { vectors }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn to_correlation(&self) -> CorrelationMatrix {
        gram_to_correlation(self)
    }
}

/// Hermitian PSD matrix with unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    b: Matrix,
}

impl CorrelationMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.b
    }

    pub fn into_matrix(self) -> Matrix {
        self.b
    }

    pub fn dim(&self) -> usize {
        self.b.dim()
    }

    /// Unit vectors e_i with B_ij = ⟨e_i, e_j⟩, read off the spectral
    /// decomposition: e_i[k] = √λ_k · v_k[i].
    pub fn factor(&self) -> GramFactor {
        let n = self.dim();
        let eig = self.b.hermitian_eigs().expect("validated correlation matrix is Hermitian");
        let roots: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
        let vectors = (0..n)
            .map(|i| {
                let v: Vec<Complex64> = (0..n).map(|k| eig.eigenvectors[(i, k)] * roots[k]).collect();
                let norm = vec_norm(&v);
                v.into_iter().map(|z| z / norm).collect()
            })
            .collect();
        GramFactor { vectors }
    }

    /// Caller guarantees the correlation-matrix invariants.
    pub(crate) fn from_matrix_unchecked(b: Matrix) -> Self {
        Self { b }
    }

    pub fn transpose(&self) -> CorrelationMatrix {
        CorrelationMatrix { b: self.b.transpose() }
    }
}

pub fn gram_to_correlation(g: &GramFactor) -> CorrelationMatrix {
    let n = g.dim();
    let v = g.vectors();
    let mut b = Matrix::from_fn(n, |i, j| if i <= j { inner(&v[i], &v[j]) } else { Complex64::default() });
    for i in 0..n {
        b[(i, i)] = Complex64::new(1.0, 0.0);
        for j in 0..i {
            b[(i, j)] = b[(j, i)].conj();
        }
    }
    CorrelationMatrix { b }
}

pub fn validate_correlation(b: &Matrix) -> Result<CorrelationMatrix> {
    let scale = b.frobenius_norm();
    let deviation = b.hermitian_deviation();
    if deviation > 1e-12 * (1.0 + scale) {
        return Err(Error::NotHermitian { deviation });
    }
    for i in 0..b.dim() {
        let d = b[(i, i)];
        if (d - 1.0).norm() > DIAGONAL_TOL {
            return Err(Error::DiagonalNotOne { index: i, value: d.re });
        }
    }
    let min_eigenvalue = b.hermitian_eigs()?.min();
    if min_eigenvalue < -PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    Ok(CorrelationMatrix { b: b.clone() })
}

pub fn random_correlation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CorrelationMatrix {
    GramFactor::random(n, rng).to_correlation()
}

/// [[1, z], [conj(z), 1]]; every point of ℰ_2 has this form.
pub fn correlation_2x2(z: Complex64) -> Result<CorrelationMatrix> {
    let modulus = z.norm();
    if modulus > 1.0 + 1e-12 {
        return Err(Error::OutOfDisk { modulus });
    }
    let one = Complex64::new(1.0, 0.0);
    Ok(CorrelationMatrix { b: Matrix::from_complex_rows(&[vec![one, z], vec![z.conj(), one]])? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::seeded_rng;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn orthonormal_basis_gives_identity() {
        assert_eq!(GramFactor::standard(4).to_correlation().matrix(), &Matrix::identity(4));
    }

    #[test]
    fn equal_vectors_give_all_ones() {
        let v = vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)];
        let g = GramFactor::new(vec![v.clone(), v.clone(), v]).unwrap();
        let b = g.to_correlation();
        assert!((b.matrix() - &Matrix::from_fn(3, |_, _| c(1., 0.))).max_abs() < 1e-15);
    }

    #[test]
    fn inner_product_convention() {
        // e_2 = z e_1 ⇒ B_12 = ⟨e_1, z e_1⟩ = conj(z)
        let z = Complex64::from_polar(1.0, 0.7);
        let e1 = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let e2: Vec<Complex64> = e1.iter().map(|x| x * z).collect();
        let b = GramFactor::new(vec![e1, e2]).unwrap().to_correlation();
        assert!((b.matrix()[(0, 1)] - z.conj()).norm() < 1e-15);
        assert!((b.matrix()[(1, 0)] - z).norm() < 1e-15);
    }

    #[test]
    fn validation_examples() {
        assert!(validate_correlation(&Matrix::identity(3)).is_ok());
        let bad = Matrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(matches!(validate_correlation(&bad), Err(Error::NotPsd { .. })));
        let diag = Matrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 1.0]]);
        assert!(matches!(validate_correlation(&diag), Err(Error::DiagonalNotOne { index: 0, .. })));
        assert!(matches!(validate_correlation(&Matrix::unit(2, 0, 1)), Err(Error::NotHermitian { .. })));
        for z in [c(1.0, 0.0), c(0.0, -1.0), c(0.3, 0.4), Complex64::from_polar(1.0, 2.1)] {
            assert!(validate_correlation(correlation_2x2(z).unwrap().matrix()).is_ok());
        }
    }

    #[test]
    fn correlation_2x2_examples() {
        assert_eq!(correlation_2x2(c(0., 0.)).unwrap().matrix(), &Matrix::identity(2));
        assert_eq!(correlation_2x2(c(1., 0.)).unwrap().matrix(), &Matrix::from_real_rows(&[&[1., 1.], &[1., 1.]]));
        let b = correlation_2x2(c(0., 0.5)).unwrap();
        let eig = b.matrix().hermitian_eigs().unwrap();
        assert!((eig.min() - 0.5).abs() < 1e-15);
        assert!(matches!(correlation_2x2(c(0.8, 0.8)), Err(Error::OutOfDisk { .. })));
    }

    #[test]
    fn random_correlation_examples() {
        let mut rng = seeded_rng(1);
        assert_eq!(random_correlation(1, &mut rng).matrix(), &Matrix::identity(1));
        for n in 1..7 {
            assert!(validate_correlation(random_correlation(n, &mut rng).matrix()).is_ok());
        }
        assert_eq!(random_correlation(4, &mut seeded_rng(8)), random_correlation(4, &mut seeded_rng(8)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn refactorization_round_trips(seed in any::<u64>(), n in 1usize..7) {
            let b = random_correlation(n, &mut seeded_rng(seed));
            let back = b.factor().to_correlation();
            prop_assert!((back.matrix() - b.matrix()).frobenius_norm() <= 1e-9);
        }

        #[test]
        fn transpose_stays_in_elliptope(seed in any::<u64>(), n in 1usize..7) {
            let b = random_correlation(n, &mut seeded_rng(seed));
            prop_assert!(validate_correlation(b.transpose().matrix()).is_ok());
        }

        #[test]
        fn convex_combinations_stay_in_elliptope(seed in any::<u64>(), n in 1usize..7, t in 0.0f64..=1.0) {
            let mut rng = seeded_rng(seed);
            let b1 = random_correlation(n, &mut rng);
            let b2 = random_correlation(n, &mut rng);
            let mix = &b1.matrix().scale_real(t) + &b2.matrix().scale_real(1.0 - t);
            prop_assert!(validate_correlation(&mix).is_ok());
        }
    }
}

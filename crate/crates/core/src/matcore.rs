//! Dense complex linear algebra kernel.
//!
//! Everything here works on small dense matrices (n up to a few dozen). The
//! Hermitian eigensolver is a cyclic complex Jacobi method, which is slow
//! asymptotically but accurate to a few ulps of ‖M‖ on every eigenpair, and
//! the rest of the crate leans on that accuracy for its PSD certificates.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexScalar = Complex64;

/// Absolute-plus-relative tolerance pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub atol: f64,
    pub rtol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { atol: 1e-12, rtol: 1e-10 }
    }
}

impl Tolerances {
    pub fn bound(&self, scale: f64) -> f64 {
        self.atol + self.rtol * scale
    }
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be positive");
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_diagonal(d: &[Complex64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &z) in d.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let d: Vec<Complex64> = d.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Builds a matrix from row-major entries; fails unless there are n² finite values.
    pub fn from_row_major(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionMismatch("n must be at least 1".into()));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { row: k / n, col: k % n });
        }
        Ok(Self { n, data })
    }

    /// Real matrix from nested rows. Panics on ragged input; meant for literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| {
            assert_eq!(rows[i].len(), n, "ragged row {i}");
            Complex64::new(rows[i][j], 0.0)
        })
    }

    pub fn from_complex_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::DimensionMismatch(format!("row {i} has {} entries, expected {n}", r.len())));
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(n, data)
    }

    /// Single 1 at (i, j).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n);
        m[(i, j)] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// τ_n(M) = Tr(M)/n.
    pub fn normalized_trace(&self) -> Complex64 {
        self.trace() / self.n as f64
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm of the strictly off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.off_diagonal_norm() <= tol
    }

    /// ‖M − M*‖_F.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// (Re M, Im M) with Re M = (M + M*)/2 and Im M = (M − M*)/2i, so M = Re M + i·Im M.
    pub fn hermitian_parts(&self) -> (Matrix, Matrix) {
        let re = Self::from_fn(self.n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5);
        let half_over_i = Complex64::new(0.0, -0.5);
        let im = Self::from_fn(self.n, |i, j| (self[(i, j)] - self[(j, i)].conj()) * half_over_i);
        (re, im)
    }

    /// H_θ = Re(e^{−iθ} M).
    pub fn rotated_hermitian(&self, theta: f64) -> Matrix {
        let rot = Complex64::from_polar(1.0, -theta);
        Self::from_fn(self.n, |i, j| (rot * self[(i, j)] + (rot * self[(j, i)]).conj()) * 0.5)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// Block-diagonal direct sum self ⊕ other.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let (a, b) = (self.n, other.n);
        Self::from_fn(a + b, |i, j| match (i < a, j < a) {
            (true, true) => self[(i, j)],
            (false, false) => other[(i - a, j - a)],
            _ => Complex64::new(0.0, 0.0),
        })
    }

    /// Conjugation U* M U.
    pub fn conjugate_by(&self, u: &Matrix) -> Matrix {
        &(&u.adjoint() * self) * u
    }

    pub fn hermitian_eigs(&self) -> Result<SpectralDecomposition> {
        hermitian_eigs(self)
    }

    pub fn operator_norm(&self) -> f64 {
        operator_norm(self)
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in add");
        Matrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in sub");
        Matrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch in mul");
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

/// ⟨x, y⟩ = Σ x_i · conj(y_i), linear in the first argument.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

pub fn vec_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Outer product x x*.
pub fn outer(x: &[Complex64]) -> Matrix {
    Matrix::from_fn(x.len(), |i, j| x[i] * x[j].conj())
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column k is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Matrix,
}

impl SpectralDecomposition {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    /// V Λ V*.
    pub fn reconstruct(&self) -> Matrix {
        let v = &self.eigenvectors;
        let n = v.dim();
        Matrix::from_fn(n, |i, j| (0..n).map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj()).sum())
    }
}

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_THRESHOLD: f64 = 1e-13;

/// Cyclic complex Jacobi eigensolver.
pub fn hermitian_eigs(m: &Matrix) -> Result<SpectralDecomposition> {
    let scale = m.frobenius_norm();
    let deviation = m.hermitian_deviation();
    if deviation > 1e-12 * (1.0 + scale) {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.dim();
    let mut a = Matrix::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    for i in 0..n {
        a[(i, i)].im = 0.0;
    }
    let mut v = Matrix::identity(n);
    let threshold = OFF_DIAGONAL_THRESHOLD * scale;

    let mut converged = n == 1 || a.off_diagonal_norm() <= threshold;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        converged = a.off_diagonal_norm() <= threshold;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps, off_diagonal: a.off_diagonal_norm() });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = Matrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// One Jacobi rotation zeroing a[p][q]. The unitary is G = diag(1, e^{−iφ})·R on the
/// (p, q) plane, where e^{iφ} is the phase of a[p][q] and R is the real rotation.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
    let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let pc = phase.conj();
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -pc * s;
    let g_qq = pc * c;

    let n = a.dim();
    for k in 0..n {
        let (x, y) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = x * g_pp + y * g_qp;
        a[(k, q)] = x * g_pq + y * g_qq;
    }
    for k in 0..n {
        let (x, y) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = g_pp.conj() * x + g_qp.conj() * y;
        a[(q, k)] = g_pq.conj() * x + g_qq.conj() * y;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    for k in 0..n {
        let (x, y) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = x * g_pp + y * g_qp;
        v[(k, q)] = x * g_pq + y * g_qq;
    }
}

/// Largest singular value with its left and right singular vectors.
#[derive(Debug, Clone)]
pub struct SingularTriple {
    pub sigma: f64,
    pub left: Vec<Complex64>,
    pub right: Vec<Complex64>,
}

/// Top singular triple from the Jacobi decomposition of M*M.
pub fn top_singular(m: &Matrix) -> SingularTriple {
    let n = m.dim();
    let gram = &m.adjoint() * m;
    let eig = hermitian_eigs(&gram).expect("M*M is Hermitian by construction");
    let sigma = eig.max().max(0.0).sqrt();
    let right = eig.vector(n - 1);
    let mv = m.mul_vec(&right);
    let norm = vec_norm(&mv);
    let left = if norm > 0.0 { mv.iter().map(|z| z / norm).collect() } else { right.clone() };
    SingularTriple { sigma, left, right }
}

/// Largest singular value.
pub fn operator_norm(m: &Matrix) -> f64 {
    if m.dim() == 1 {
        return m[(0, 0)].norm();
    }
    top_singular(m).sigma
}

pub fn normalized_trace(m: &Matrix) -> Complex64 {
    m.normalized_trace()
}

pub fn hermitian_parts(m: &Matrix) -> (Matrix, Matrix) {
    m.hermitian_parts()
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix of i.i.d. standard complex Gaussians (E|z|² = 1).
pub fn ginibre_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(n, |_, _| complex_gaussian(rng))
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    ginibre_random(n, rng).hermitian_parts().0
}

/// Haar-distributed k×k unitary: Gram–Schmidt on a Ginibre matrix. The
/// resulting R factor has a positive diagonal, which is the phase correction
/// that makes the law exactly Haar.
pub fn haar_unitary<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Matrix {
    let g = ginibre_random(k, rng);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    for j in 0..k {
        let mut x = g.column(j);
        // twice is enough
        for _ in 0..2 {
            for q in &cols {
                let proj = inner(&x, q);
                for (xi, qi) in x.iter_mut().zip(q) {
                    *xi -= proj * qi;
                }
            }
        }
        let norm = vec_norm(&x);
        cols.push(x.iter().map(|z| z / norm).collect());
    }
    Matrix::from_fn(k, |i, j| cols[j][i])
}

/// Diagonal unitary with uniform random phases.
pub fn random_diagonal_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let d: Vec<Complex64> =
        (0..n).map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))).collect();
    Matrix::from_diagonal(&d)
}

/// Permutation matrix sending basis vector j to basis vector perm[j].
pub fn permutation_matrix(perm: &[usize]) -> Matrix {
    let n = perm.len();
    let mut p = Matrix::zeros(n);
    for (j, &i) in perm.iter().enumerate() {
        p[(i, j)] = Complex64::new(1.0, 0.0);
    }
    p
}

pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// Random complex diagonal matrix with trace zero.
pub fn random_trace_zero_diagonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let mut d: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
    let mean = d.iter().sum::<Complex64>() / n as f64;
    for z in &mut d {
        *z -= mean;
    }
    Matrix::from_diagonal(&d)
}

pub fn random_diagonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let d: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
    Matrix::from_diagonal(&d)
}

/// Deterministic child seed for the `index`-th independent task of a run.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn pauli_x_spectrum() {
        let m = Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let eig = m.hermitian_eigs().unwrap();
        assert_close(eig.eigenvalues[0], -1.0, 1e-14);
        assert_close(eig.eigenvalues[1], 1.0, 1e-14);
    }

    #[test]
    fn identity_spectrum() {
        let eig = Matrix::identity(5).hermitian_eigs().unwrap();
        assert!(eig.eigenvalues.iter().all(|&l| (l - 1.0).abs() < 1e-15));
    }

    #[test]
    fn two_one_one_two() {
        // (2 − λ)² − 1 = 0
        let m = Matrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let eig = m.hermitian_eigs().unwrap();
        assert_close(eig.eigenvalues[0], 1.0, 1e-14);
        assert_close(eig.eigenvalues[1], 3.0, 1e-14);
    }

    #[test]
    fn complex_two_by_two() {
        // [[1, i], [−i, 1]] has eigenvalues 0 and 2
        let m = Matrix::from_complex_rows(&[vec![c(1., 0.), c(0., 1.)], vec![c(0., -1.), c(1., 0.)]]).unwrap();
        let eig = m.hermitian_eigs().unwrap();
        assert_close(eig.eigenvalues[0], 0.0, 1e-14);
        assert_close(eig.eigenvalues[1], 2.0, 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = Matrix::unit(2, 0, 1);
        assert!(matches!(m.hermitian_eigs(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eigenpairs_on_random_hermitian() {
        let mut rng = seeded_rng(11);
        for n in 1..=8 {
            let m = random_hermitian(n, &mut rng);
            let eig = m.hermitian_eigs().unwrap();
            let norm = m.operator_norm();
            for k in 0..n {
                let v = eig.vector(k);
                let mv = m.mul_vec(&v);
                let res: f64 =
                    mv.iter().zip(&v).map(|(a, b)| (a - b * eig.eigenvalues[k]).norm_sqr()).sum::<f64>().sqrt();
                assert!(res <= 1e-10 * norm.max(1.0), "residual {res}");
            }
            let v = &eig.eigenvectors;
            let gram = &v.adjoint() * v;
            assert!((&gram - &Matrix::identity(n)).max_abs() < 1e-10);
            assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn operator_norm_examples() {
        assert_close(Matrix::unit(2, 0, 1).operator_norm(), 1.0, 1e-14);
        assert_eq!(Matrix::zeros(3).operator_norm(), 0.0);
        let m = Matrix::from_real_rows(&[&[0.0, 2.0], &[1.0, 0.0]]);
        assert_close(m.operator_norm(), 2.0, 1e-13);
    }

    #[test]
    fn top_singular_vectors_are_consistent() {
        let mut rng = seeded_rng(3);
        let m = ginibre_random(5, &mut rng);
        let t = top_singular(&m);
        let mv = m.mul_vec(&t.right);
        for (a, b) in mv.iter().zip(&t.left) {
            assert!((a - b * t.sigma).norm() < 1e-10);
        }
    }

    #[test]
    fn normalized_trace_examples() {
        let m = Matrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 5.0]]);
        assert_eq!(m.normalized_trace(), c(3.0, 0.0));
        assert_eq!(Matrix::identity(4).normalized_trace(), c(1.0, 0.0));
        assert_eq!(Matrix::unit(2, 0, 1).normalized_trace(), c(0.0, 0.0));
    }

    #[test]
    fn hermitian_parts_examples() {
        let (re, im) = Matrix::unit(2, 0, 1).hermitian_parts();
        assert_eq!(re, Matrix::from_real_rows(&[&[0.0, 0.5], &[0.5, 0.0]]));
        assert_eq!(im[(0, 1)], c(0.0, -0.5));
        assert_eq!(im[(1, 0)], c(0.0, 0.5));
        let eig = im.hermitian_eigs().unwrap();
        assert_close(eig.eigenvalues[0], -0.5, 1e-15);
        assert_close(eig.eigenvalues[1], 0.5, 1e-15);

        let h = Matrix::from_real_rows(&[&[1.0, 2.0], &[2.0, -1.0]]);
        assert_eq!(h.hermitian_parts().1.max_abs(), 0.0);

        let (re, im) = Matrix::identity(2).scale(c(0.0, 1.0)).hermitian_parts();
        assert_eq!(re.max_abs(), 0.0);
        assert_eq!(im, Matrix::identity(2));
    }

    #[test]
    fn haar_is_unitary_and_reproducible() {
        let mut rng = seeded_rng(5);
        let u1 = haar_unitary(1, &mut rng);
        assert_close(u1[(0, 0)].norm(), 1.0, 1e-15);
        for k in 1..=16 {
            let u = haar_unitary(k, &mut rng);
            let e = &(&u.adjoint() * &u) - &Matrix::identity(k);
            assert!(e.max_abs() <= 1e-12, "k = {k}: {}", e.max_abs());
        }
        let a = haar_unitary(4, &mut seeded_rng(99));
        let b = haar_unitary(4, &mut seeded_rng(99));
        assert_eq!(a, b);
    }

    #[test]
    fn ginibre_mean_is_small() {
        let mut rng = seeded_rng(17);
        let samples = 4000;
        let mean: Complex64 =
            (0..samples).map(|_| ginibre_random(1, &mut rng)[(0, 0)]).sum::<Complex64>() / samples as f64;
        assert!(mean.norm() <= 5.0 / (samples as f64).sqrt());
        assert_eq!(ginibre_random(3, &mut seeded_rng(1)), ginibre_random(3, &mut seeded_rng(1)));
        assert_eq!(ginibre_random(1, &mut rng).dim(), 1);
    }

    #[test]
    fn direct_sum_layout() {
        let a = Matrix::unit(2, 0, 1);
        let s = a.direct_sum(&Matrix::zeros(1));
        assert_eq!(s.dim(), 3);
        assert_eq!(s[(0, 1)], c(1.0, 0.0));
        assert_eq!(s.max_abs(), 1.0);
    }

    #[test]
    fn from_row_major_rejects_bad_input() {
        assert!(matches!(Matrix::from_row_major(2, vec![c(0., 0.); 3]), Err(Error::DimensionMismatch(_))));
        assert!(matches!(Matrix::from_row_major(1, vec![c(f64::NAN, 0.)]), Err(Error::NonFinite { .. })));
    }
}

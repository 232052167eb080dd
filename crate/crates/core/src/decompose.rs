//! Positive semidefinite plus trace-zero-diagonal decompositions A = P + D and
//! the sum-of-squares certificates p_A = Σ_k x_k* x_k they induce.
//!
//! For Hermitian H, min_{B ∈ ℰ_n} Tr(HB) has the dual
//! max Σ y_i subject to H − diag(y) ⪰ 0, and Slater's point B = I makes the
//! duality exact. A dual point with Σ y_i ≥ 0 splits H as
//!
//!   P = H − diag(y) + (Σy/n)·I ⪰ 0,   D = diag(y) − (Σy/n)·I,  Tr D = 0.
//!
//! A matrix with a real range has a diagonal, trace-zero Im A, which is
//! carried in D.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptope::GramFactor;
use crate::error::{Error, Result};
use crate::io::WireComplex;
use crate::matcore::{outer, Matrix};
use crate::range::{maximize_over_elliptope, real_range_screen, SolverConfig};

const NONNEGATIVE_TOL: f64 = 1e-9;
const DUAL_ITERATIONS: usize = 5000;

/// Cooperative cancellation for long solves.
#[derive(Debug, Clone, Default)]
pub struct CancellationToken(Arc<AtomicBool>);

impl CancellationToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonnegativityResult {
    pub nonnegative: bool,
    /// Primal minimum of W_c(A) (an upper bound on the true minimum).
    pub margin: f64,
    /// Dual lower bound on min W_c(A).
    pub lower_bound: f64,
    /// y with Re A − diag(y) ⪰ 0; (1/n)Σy = lower_bound.
    pub dual_y: Vec<f64>,
    /// Minimizer B̂ of τ_n(Re(A) B).
    pub minimizer: GramFactor,
    pub certified: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Decomposition {
    pub p: Matrix,
    pub d: Matrix,
    /// (1/n)Σy: the certified lower bound on min W_c(A).
    pub margin: f64,
}

impl Decomposition {
    /// Checks λ_min(P) ≥ −1e-9, D diagonal with |Tr D| ≤ 1e-10, and ‖P + D − A‖ ≤ 1e-9.
    pub fn check(&self, a: &Matrix) -> Result<()> {
        let min_eigenvalue = self.p.hermitian_eigs()?.min();
        if min_eigenvalue < -1e-9 {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        if self.d.off_diagonal_norm() != 0.0 {
            return Err(Error::InvalidArgument("D has off-diagonal entries".into()));
        }
        if self.d.trace().norm() > 1e-10 {
            return Err(Error::InvalidArgument(format!("Tr D = {}", self.d.trace())));
        }
        let residual = (&(&self.p + &self.d) - a).operator_norm();
        if residual > 1e-9 {
            return Err(Error::InvalidArgument(format!("‖P + D − A‖ = {residual:.3e}")));
        }
        Ok(())
    }
}

/// Solves min_{B ∈ ℰ_n} τ_n(H B) for Hermitian H; returns (primal min, dual y, minimizer).
fn minimize_hermitian(h: &Matrix, cfg: &SolverConfig) -> (f64, Vec<f64>, GramFactor, bool) {
    let sol = maximize_over_elliptope(&h.scale_real(-1.0), cfg);
    let y: Vec<f64> = sol.dual_y.iter().map(|v| -v).collect();
    (-sol.value, y, sol.gram, sol.certified)
}

/// Decides whether W_c(A) ⊆ [0, ∞).
pub fn nonnegativity_test(a: &Matrix, cfg: &SolverConfig) -> Result<NonnegativityResult> {
    let (re, _) = real_range_screen(a)?;
    let n = a.dim();
    let (primal, dual_y, minimizer, certified) = minimize_hermitian(&re, cfg);
    let lower_bound = dual_y.iter().sum::<f64>() / n as f64;
    Ok(NonnegativityResult {
        nonnegative: primal >= -NONNEGATIVE_TOL,
        margin: primal,
        lower_bound,
        dual_y,
        minimizer,
        certified,
    })
}

/// g(y) = Σy + n·λ_min(H − diag y). For any y, y + λ_min·1 is dual feasible
/// with objective g(y), so maximizing g is the dual problem without constraints.
fn penalized_dual(h: &Matrix, y: &[f64]) -> (f64, Vec<Complex64>) {
    let n = h.dim();
    let slack = h - &Matrix::from_real_diagonal(y);
    let eig = slack.hermitian_eigs().expect("Hermitian slack");
    (y.iter().sum::<f64>() + n as f64 * eig.min(), eig.vector(0))
}

/// Projected supergradient ascent on g with Polyak steps aimed at the primal
/// bound `target` (= n·min τ_n(HB̂)). Returns the best feasible y found.
fn polish_dual(h: &Matrix, y0: &[f64], target: f64, cancel: Option<&CancellationToken>) -> Result<Vec<f64>> {
    let n = h.dim();
    let feasible = |y: &[f64], g: f64| -> Vec<f64> {
        let shift = (g - y.iter().sum::<f64>()) / n as f64 - 8.0 * f64::EPSILON * (1.0 + h.frobenius_norm());
        y.iter().map(|v| v + shift).collect()
    };
    let mut y = y0.to_vec();
    let (mut g, mut v) = penalized_dual(h, &y);
    let mut best = (g, feasible(&y, g));
    for it in 0..DUAL_ITERATIONS {
        if it % 64 == 0 && cancel.is_some_and(|c| c.is_cancelled()) {
            return Err(Error::Cancelled);
        }
        let grad: Vec<f64> = v.iter().map(|z| 1.0 - n as f64 * z.norm_sqr()).collect();
        let norm2: f64 = grad.iter().map(|x| x * x).sum();
        let deficit = target - g;
        if norm2 < 1e-30 || deficit <= 1e-14 * (1.0 + target.abs()) {
            break;
        }
        let step = deficit / norm2;
        for (yi, gi) in y.iter_mut().zip(&grad) {
            *yi += step * gi;
        }
        (g, v) = penalized_dual(h, &y);
        if g > best.0 {
            best = (g, feasible(&y, g));
        }
    }
    Ok(best.1)
}

pub fn decompose(a: &Matrix, cfg: &SolverConfig) -> Result<Decomposition> {
    decompose_with_cancel(a, cfg, None)
}

pub fn decompose_with_cancel(
    a: &Matrix,
    cfg: &SolverConfig,
    cancel: Option<&CancellationToken>,
) -> Result<Decomposition> {
    let (re, im) = real_range_screen(a)?;
    let n = a.dim();
    let (primal, mut y, _, certified) = minimize_hermitian(&re, cfg);
    let mut dual = y.iter().sum::<f64>() / n as f64;

    if dual < -NONNEGATIVE_TOL && primal >= -NONNEGATIVE_TOL {
        // the sign is undecided by the ascent's certificate; work the dual directly
        y = polish_dual(&re, &y, n as f64 * primal, cancel)?;
        dual = y.iter().sum::<f64>() / n as f64;
    }
    if dual < -NONNEGATIVE_TOL {
        if primal < -NONNEGATIVE_TOL {
            return Err(Error::NotDecomposable { dual_value: dual, primal_value: primal });
        }
        return Err(Error::GapNotClosed { gap: primal - dual, tol: cfg.tol, restarts: cfg.restarts });
    }
    if !certified && primal - dual > cfg.tol {
        return Err(Error::GapNotClosed { gap: primal - dual, tol: cfg.tol, restarts: cfg.restarts });
    }

    let shifted: Vec<f64> = y.iter().map(|v| v - dual).collect();
    let d_real = Matrix::from_real_diagonal(&shifted);
    let p = &re - &d_real;
    let im_diag: Vec<Complex64> = im.diagonal().iter().map(|z| Complex64::new(0.0, z.re)).collect();
    let d = &d_real + &Matrix::from_diagonal(&im_diag);
    Ok(Decomposition { p, d, margin: dual })
}

/// p_A = Σ_k x_k* x_k (mod trace-zero diagonals) with x_k = Σ_j conj(q_k[j]) u_j,
/// so that Σ_k q_k q_k* = P.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SosCertificate {
    pub n: usize,
    pub q: Vec<Vec<Complex64>>,
    /// Diagonal of D.
    pub d: Vec<Complex64>,
    /// ‖P − Σ q_k q_k*‖_F at construction.
    pub residual: f64,
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    n: usize,
    q: Vec<Vec<WireComplex>>,
    #[serde(rename = "D")]
    d: Vec<WireComplex>,
    residual: f64,
}

impl SosCertificate {
    pub fn gram_sum(&self) -> Matrix {
        let mut s = Matrix::zeros(self.n);
        for q in &self.q {
            s = &s + &outer(q);
        }
        s
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let file = CertificateFile {
            n: self.n,
            q: self.q.iter().map(|v| v.iter().map(|&z| z.into()).collect()).collect(),
            d: self.d.iter().map(|&z| z.into()).collect(),
            residual: self.residual,
        };
        serde_json::to_value(file).expect("plain data")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: CertificateFile = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        if file.d.len() != file.n || file.q.iter().any(|v| v.len() != file.n) {
            return Err(Error::DimensionMismatch(format!("certificate vectors must have length {}", file.n)));
        }
        Ok(Self {
            n: file.n,
            q: file.q.into_iter().map(|v| v.into_iter().map(Complex64::from).collect()).collect(),
            d: file.d.into_iter().map(Complex64::from).collect(),
            residual: file.residual,
        })
    }

    /// Human-readable form of the free-group polynomial.
    pub fn polynomial(&self) -> String {
        let term = |q: &[Complex64]| {
            let parts: Vec<String> = q
                .iter()
                .enumerate()
                .filter(|(_, z)| z.norm() > 1e-12)
                .map(|(j, z)| {
                    let c = z.conj();
                    format!("({:.6}{:+.6}i)·u{}", c.re, c.im, j + 1)
                })
                .collect();
            let x = parts.join(" + ");
            format!("({x})*({x})")
        };
        if self.q.is_empty() {
            return "0".into();
        }
        self.q.iter().map(|q| term(q)).collect::<Vec<_>>().join(" + ")
    }
}

/// Spectral factorization P = Σ λ_k w_k w_k*, q_k = √λ_k·w_k, dropping
/// eigenvalues below 1e-10·‖P‖.
pub fn sos_certificate(dec: &Decomposition) -> SosCertificate {
    let n = dec.p.dim();
    let eig = dec.p.hermitian_eigs().expect("P is Hermitian");
    let cut = 1e-10 * eig.max().abs().max(eig.min().abs());
    let q: Vec<Vec<Complex64>> = (0..n)
        .rev()
        .filter(|&k| eig.eigenvalues[k] > cut)
        .map(|k| {
            let r = eig.eigenvalues[k].sqrt();
            eig.vector(k).into_iter().map(|z| z * r).collect()
        })
        .collect();
    let mut cert = SosCertificate { n, q, d: dec.d.diagonal(), residual: 0.0 };
    cert.residual = (&dec.p - &cert.gram_sum()).frobenius_norm();
    cert
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub valid: bool,
    /// ‖A − Σ q_k q_k* − D‖_F.
    pub residual: f64,
    pub trace_d: f64,
    pub rank: usize,
}

const CERTIFICATE_TOL: f64 = 1e-8;

/// A ≡ Σ q_k q_k* modulo the trace-zero diagonal D.
pub fn verify_certificate(a: &Matrix, cert: &SosCertificate) -> CertificateCheck {
    if cert.n != a.dim() || cert.d.len() != cert.n || cert.q.iter().any(|v| v.len() != cert.n) {
        return CertificateCheck { valid: false, residual: f64::INFINITY, trace_d: f64::NAN, rank: cert.q.len() };
    }
    let trace_d = cert.d.iter().sum::<Complex64>().norm();
    let rebuilt = &cert.gram_sum() + &Matrix::from_diagonal(&cert.d);
    let residual = (a - &rebuilt).frobenius_norm();
    CertificateCheck {
        valid: residual <= CERTIFICATE_TOL && trace_d <= 1e-9 && cert.q.len() <= cert.n,
        residual,
        trace_d,
        rank: cert.q.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{ginibre_random, random_hermitian, random_trace_zero_diagonal, seeded_rng};
    use proptest::prelude::*;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn nonnegativity_examples() {
        let r = nonnegativity_test(&Matrix::from_real_rows(&[&[1., 1.], &[1., 1.]]), &cfg()).unwrap();
        assert!(r.nonnegative && r.margin.abs() < 1e-12);
        let r = nonnegativity_test(&Matrix::from_real_rows(&[&[1., 2.], &[2., 1.]]), &cfg()).unwrap();
        assert!(!r.nonnegative && (r.margin + 1.0).abs() < 1e-12);
        let mut rng = seeded_rng(3);
        for n in 1..6 {
            let g = ginibre_random(n, &mut rng);
            let psd = &g * &g.adjoint();
            assert!(nonnegativity_test(&psd, &cfg()).unwrap().nonnegative);
        }
        assert!(matches!(nonnegativity_test(&Matrix::unit(2, 0, 1), &cfg()), Err(Error::RangeNotReal { .. })));
    }

    #[test]
    fn decompose_half_correlated() {
        let a = Matrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 1.0]]);
        let dec = decompose(&a, &cfg()).unwrap();
        assert!((&dec.p - &a).max_abs() < 1e-12);
        assert!(dec.d.max_abs() < 1e-12);
        dec.check(&a).unwrap();
    }

    #[test]
    fn decompose_psd_is_identity_split() {
        let mut rng = seeded_rng(8);
        let g = ginibre_random(4, &mut rng);
        let a = &g * &g.adjoint();
        let dec = decompose(&a, &cfg()).unwrap();
        dec.check(&a).unwrap();
        let cert = sos_certificate(&dec);
        assert!(verify_certificate(&a, &cert).valid);
    }

    #[test]
    fn decompose_boundary_case() {
        let a = Matrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 0.0]]);
        let dec = decompose(&a, &cfg()).unwrap();
        assert!((&dec.p - &Matrix::from_real_rows(&[&[1., 1.], &[1., 1.]])).max_abs() < 1e-9);
        assert!((&dec.d - &Matrix::from_real_diagonal(&[1.0, -1.0])).max_abs() < 1e-9);
        assert!(dec.p.hermitian_eigs().unwrap().min().abs() < 1e-9);
        dec.check(&a).unwrap();
    }

    #[test]
    fn decompose_carries_imaginary_diagonal() {
        let a = &Matrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 1.0]])
            + &Matrix::from_diagonal(&[Complex64::new(0.0, 2.0), Complex64::new(0.0, -2.0)]);
        let dec = decompose(&a, &cfg()).unwrap();
        dec.check(&a).unwrap();
        assert!((dec.d[(0, 0)] - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn decompose_rejects_negative_range() {
        let a = Matrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        match decompose(&a, &cfg()) {
            Err(Error::NotDecomposable { dual_value, primal_value }) => {
                assert!((primal_value + 1.0).abs() < 1e-12);
                assert!(dual_value <= primal_value);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cancellation_is_observed() {
        let token = CancellationToken::new();
        token.cancel();
        // a zero-margin input forces the dual polish, which polls the token
        let h = Matrix::from_real_rows(&[&[1.0, 1.0, 0.3], &[1.0, 1.0, 0.2], &[0.3, 0.2, 1.0]]);
        let lo = nonnegativity_test(&h, &cfg()).unwrap().margin;
        let a = &h - &Matrix::identity(3).scale_real(lo);
        let r = polish_dual(&a, &[-1.0; 3], 0.0, Some(&token));
        assert_eq!(r.unwrap_err(), Error::Cancelled);
        assert!(decompose_with_cancel(&a, &cfg(), None).is_ok());
    }

    #[test]
    fn polish_improves_a_poor_dual() {
        let a = Matrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 1.0]]);
        // optimum Σy = 1 at y = (0.5, 0.5)
        let y = polish_dual(&a, &[-3.0, 2.0], 1.0, None).unwrap();
        let slack = &a - &Matrix::from_real_diagonal(&y);
        assert!(slack.hermitian_eigs().unwrap().min() >= -1e-12);
        assert!((y.iter().sum::<f64>() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sos_examples() {
        let ones = Matrix::from_real_rows(&[&[1., 1.], &[1., 1.]]);
        let cert = sos_certificate(&Decomposition { p: ones.clone(), d: Matrix::zeros(2), margin: 0.0 });
        assert_eq!(cert.q.len(), 1);
        let q = &cert.q[0];
        // q = ±(1, 1) up to a global phase
        assert!((q[0].norm() - 1.0).abs() < 1e-12 && (q[0] - q[1]).norm() < 1e-12);

        let cert = sos_certificate(&Decomposition { p: Matrix::identity(2), d: Matrix::zeros(2), margin: 1.0 });
        assert_eq!(cert.q.len(), 2);
        assert!((&cert.gram_sum() - &Matrix::identity(2)).max_abs() < 1e-14);
        assert!(cert.polynomial().contains("u1") && cert.polynomial().contains("u2"));
    }

    #[test]
    fn verify_examples() {
        let a = Matrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 1.0]]);
        let mut cert = sos_certificate(&decompose(&a, &cfg()).unwrap());
        assert!(verify_certificate(&a, &cert).valid);
        cert.q[0][0] += 0.1;
        let check = verify_certificate(&a, &cert);
        assert!(!check.valid && check.residual > 1e-3);

        let wrong = SosCertificate {
            n: 2,
            q: vec![vec![Complex64::new(1.0, 0.0); 2]],
            d: vec![Complex64::default(); 2],
            residual: 0.0,
        };
        let b = Matrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(!verify_certificate(&b, &wrong).valid);
    }

    #[test]
    fn certificate_json_round_trips() {
        let a = Matrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 0.0]]);
        let cert = sos_certificate(&decompose(&a, &cfg()).unwrap());
        let text = crate::io::to_json_string(&cert.to_json_value());
        let back = SosCertificate::from_json_str(&text).unwrap();
        assert_eq!(back, cert);
        assert!(verify_certificate(&a, &back).valid);
        assert!(SosCertificate::from_json_str(r#"{"n":2,"q":[[{"re":1,"im":0}]],"D":[],"residual":0}"#).is_err());
    }

    fn shifted_hermitian(seed: u64, n: usize, s: f64) -> Matrix {
        let mut rng = seeded_rng(seed);
        let h = random_hermitian(n, &mut rng);
        let lo = nonnegativity_test(&h, &cfg()).unwrap().margin;
        &h - &Matrix::identity(n).scale_real(lo - s)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn stability_under_small_perturbations(seed in any::<u64>(), n in 2usize..6, s in 0.01f64..0.5) {
            let a = shifted_hermitian(seed, n, s);
            let dec = decompose(&a, &cfg()).unwrap();
            prop_assert!((dec.margin - s).abs() < 1e-8);
            let mut rng = seeded_rng(seed ^ 1);
            let e = random_hermitian(n, &mut rng);
            let e = e.scale_real(0.49 * s / e.operator_norm());
            let perturbed = &a + &e;
            let dec2 = decompose(&perturbed, &cfg()).unwrap();
            dec2.check(&perturbed).unwrap();
        }

        #[test]
        fn shift_covariance(seed in any::<u64>(), n in 2usize..6, s in 0.01f64..0.5) {
            let a = shifted_hermitian(seed, n, s);
            let d0 = random_trace_zero_diagonal(n, &mut seeded_rng(seed ^ 2));
            let dec = decompose(&a, &cfg()).unwrap();
            let shifted = &a + &d0;
            let dec2 = decompose(&shifted, &cfg()).unwrap();
            prop_assert!((&dec2.p - &dec.p).max_abs() < 1e-8);
            prop_assert!((&dec2.d - &(&dec.d + &d0)).max_abs() < 1e-8);
        }

        #[test]
        fn emitted_certificates_verify(seed in any::<u64>(), n in 1usize..6, s in 0.0f64..0.5) {
            let a = shifted_hermitian(seed, n, s);
            let dec = decompose(&a, &cfg()).unwrap();
            dec.check(&a).unwrap();
            let cert = sos_certificate(&dec);
            prop_assert!(cert.q.len() <= n);
            let check = verify_certificate(&a, &cert);
            prop_assert!(check.valid, "residual {}", check.residual);
        }
    }
}

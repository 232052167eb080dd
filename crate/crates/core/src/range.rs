//! The correlation numerical range W_c(A) = {τ_n(AB) : B ∈ ℰ_n}.
//!
//! W_c(A) is compact and convex, so it is pinned down by its support function
//!
//!   h_A(θ) = max_{B ∈ ℰ_n} Re(e^{−iθ} τ_n(AB)) = max_{B ∈ ℰ_n} τ_n(H_θ B),  H_θ = Re(e^{−iθ}A).
//!
//! Each direction is an elliptope SDP. We solve it by block-coordinate ascent on
//! a Gram factorization B = (⟨e_i, e_j⟩): with the other vectors fixed, the
//! objective in e_i is 2·Re⟨e_i, c_i⟩/n + const with c_i = Σ_{j≠i} (H_θ)_ij e_j,
//! so the exact block update is e_i ← c_i/‖c_i‖. The ascent alone gives only a
//! lower bound. The upper bound comes from a real diagonal y with
//! diag(y) − H_θ ⪰ 0, since then τ_n(H_θ B) ≤ τ_n(diag(y) B) = (1/n)Σ y_i for
//! every B ∈ ℰ_n. Complementary slackness suggests y_i = Re((H_θ B̂)_ii); that
//! candidate is shifted by its PSD violation so the certificate always holds.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elliptope::GramFactor;
use crate::error::{Error, Result};
use crate::geometry::{convex_hull, ConvexPolygon};
use crate::matcore::{derive_seed, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Target duality gap for a direction to count as certified.
    pub tol: f64,
    /// Number of starts: the first from the standard basis, the rest random.
    pub restarts: usize,
    pub max_sweeps: usize,
    /// Relative per-sweep improvement below which a run counts as stalled.
    pub sweep_tol: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-8, restarts: 8, max_sweeps: 5000, sweep_tol: 1e-13, seed: 0 }
    }
}

impl SolverConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// One certified direction of the support function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportResult {
    pub theta: f64,
    /// Primal value τ_n(H_θ B̂): a lower bound on h_A(θ).
    pub value: f64,
    pub maximizer: GramFactor,
    /// τ_n(A B̂), a point of W_c(A) on the supporting line.
    pub witness_point: Complex64,
    /// diag(dual_y) − H_θ ⪰ 0, so (1/n)Σ dual_y bounds h_A(θ) from above.
    pub dual_y: Vec<f64>,
    pub gap: f64,
    pub certified: bool,
    pub starts_used: usize,
}

impl SupportResult {
    pub fn upper_bound(&self) -> f64 {
        self.value + self.gap
    }

    pub fn require_certified(self, tol: f64, restarts: usize) -> Result<Self> {
        if self.certified {
            Ok(self)
        } else {
            Err(Error::GapNotClosed { gap: self.gap, tol, restarts })
        }
    }
}

/// Result of maximizing τ_n(H B) over ℰ_n for a Hermitian H.
#[derive(Debug, Clone)]
pub struct ElliptopeSolution {
    pub value: f64,
    pub gram: GramFactor,
    pub dual_y: Vec<f64>,
    pub gap: f64,
    pub certified: bool,
    pub starts_used: usize,
}

impl ElliptopeSolution {
    pub fn dual_value(&self) -> f64 {
        self.value + self.gap
    }
}

/// τ_n(H B) for B the Gram matrix of `v`, using Tr(HB) = Σ_ij H_ij ⟨e_j, e_i⟩.
fn objective(h: &Matrix, v: &[Vec<Complex64>]) -> f64 {
    let n = h.dim();
    let mut s = 0.0;
    for i in 0..n {
        s += h[(i, i)].re;
        for j in i + 1..n {
            let b_ji: Complex64 = v[j].iter().zip(&v[i]).map(|(a, b)| a * b.conj()).sum();
            s += 2.0 * (h[(i, j)] * b_ji).re;
        }
    }
    s / n as f64
}

/// y_i = Re((H B)_ii), shifted uniformly until diag(y) − H ⪰ 0.
fn dual_certificate(h: &Matrix, v: &[Vec<Complex64>], h_scale: f64) -> Vec<f64> {
    let n = h.dim();
    let mut y: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let b_ji: Complex64 = if i == j {
                        Complex64::new(1.0, 0.0)
                    } else {
                        v[j].iter().zip(&v[i]).map(|(a, b)| a * b.conj()).sum()
                    };
                    (h[(i, j)] * b_ji).re
                })
                .sum()
        })
        .collect();
    let slack = Matrix::from_fn(n, |i, j| if i == j { Complex64::new(y[i], 0.0) - h[(i, i)].re } else { -h[(i, j)] });
    let lambda_min = slack.hermitian_eigs().map(|e| e.min()).unwrap_or(f64::NEG_INFINITY);
    // headroom for the eigenvalue error of the Jacobi solver
    let shift = (-lambda_min).max(0.0) + 8.0 * f64::EPSILON * (1.0 + h_scale);
    for yi in &mut y {
        *yi += shift;
    }
    y
}

struct RunOutcome {
    value: f64,
    vectors: Vec<Vec<Complex64>>,
    dual_y: Vec<f64>,
    dual_value: f64,
}

fn ascend(h: &Matrix, mut v: Vec<Vec<Complex64>>, cfg: &SolverConfig, h_scale: f64) -> RunOutcome {
    let n = h.dim();
    let target = cfg.tol * 1e-2;
    let mut value = objective(h, &v);
    let mut best_dual: Option<(f64, Vec<f64>)> = None;
    let mut last_gap_improvement = 0;
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let stall = cfg.sweep_tol * (1.0 + h.off_diagonal_norm());

    for sweep in 0..cfg.max_sweeps.max(1) {
        for i in 0..n {
            c.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            for j in 0..n {
                if j == i {
                    continue;
                }
                let hij = h[(i, j)];
                if hij == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (ck, vjk) in c.iter_mut().zip(&v[j]) {
                    *ck += hij * vjk;
                }
            }
            let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            // ‖c_i‖ = 0: every unit vector is optimal, keep the current one
            if norm > 1e-300 {
                for (vk, ck) in v[i].iter_mut().zip(&c) {
                    *vk = ck / norm;
                }
            }
        }
        let new_value = objective(h, &v);
        let improvement = new_value - value;
        value = new_value;

        let check = sweep < 16 || sweep % 8 == 0 || improvement <= stall;
        if !check {
            continue;
        }
        let y = dual_certificate(h, &v, h_scale);
        let dual_value = y.iter().sum::<f64>() / n as f64;
        let better = best_dual.as_ref().is_none_or(|(d, _)| dual_value < *d - 1e-3 * (d - value).abs());
        if better {
            last_gap_improvement = sweep;
        }
        if best_dual.as_ref().is_none_or(|(d, _)| dual_value < *d) {
            best_dual = Some((dual_value, y));
        }
        let gap = best_dual.as_ref().map(|(d, _)| d - value).unwrap_or(f64::INFINITY);
        if gap <= target {
            break;
        }
        // no progress on either bound: a non-global fixed point or a very slow tail
        if improvement <= stall && sweep - last_gap_improvement > 200 {
            break;
        }
    }
    let (dual_value, dual_y) = best_dual.unwrap_or_else(|| {
        let y = dual_certificate(h, &v, h_scale);
        (y.iter().sum::<f64>() / n as f64, y)
    });
    RunOutcome { value, vectors: v, dual_y, dual_value }
}

/// Maximizes τ_n(H B) over the elliptope with restarts, returning the best
/// primal point and the best dual certificate seen across starts.
pub fn maximize_over_elliptope(h: &Matrix, cfg: &SolverConfig) -> ElliptopeSolution {
    let n = h.dim();
    // B_ii = 1 makes the diagonal of H a constant offset. Solving on the
    // off-diagonal part keeps every iterate identical under diagonal shifts.
    let diag: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    let offset = diag.iter().sum::<f64>() / n as f64;
    let h = &Matrix::from_fn(n, |i, j| if i == j { Complex64::default() } else { h[(i, j)] });
    let h_scale = h.frobenius_norm();
    let starts = cfg.restarts.max(1);
    let mut best_primal: Option<(f64, Vec<Vec<Complex64>>)> = None;
    let mut best_dual: Option<(f64, Vec<f64>)> = None;
    let mut starts_used = 0;

    for start in 0..starts {
        starts_used += 1;
        let init = if start == 0 {
            GramFactor::standard(n)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, start as u64));
            GramFactor::random(n, &mut rng)
        };
        let run = ascend(h, init.vectors().to_vec(), cfg, h_scale);
        if best_primal.as_ref().is_none_or(|(v, _)| run.value > *v) {
            best_primal = Some((run.value, run.vectors));
        }
        if best_dual.as_ref().is_none_or(|(d, _)| run.dual_value < *d) {
            best_dual = Some((run.dual_value, run.dual_y));
        }
        let gap = best_dual.as_ref().unwrap().0 - best_primal.as_ref().unwrap().0;
        if gap <= cfg.tol {
            break;
        }
    }
    let (value, vectors) = best_primal.expect("at least one start");
    let (dual_value, dual_y) = best_dual.expect("at least one start");
    let gap = dual_value - value;
    let value = value + offset;
    let dual_y = dual_y.iter().zip(&diag).map(|(y, d)| y + d).collect();
    ElliptopeSolution {
        value,
        gram: GramFactor::from_unchecked(vectors),
        dual_y,
        gap,
        certified: gap <= cfg.tol,
        starts_used,
    }
}

/// h_A(θ) with its primal maximizer and dual certificate.
pub fn support_direction(a: &Matrix, theta: f64, cfg: &SolverConfig) -> SupportResult {
    let h = a.rotated_hermitian(theta);
    let sol = maximize_over_elliptope(&h, cfg);
    let b = sol.gram.to_correlation();
    let witness_point = (a * b.matrix()).normalized_trace();
    SupportResult {
        theta,
        value: sol.value,
        maximizer: sol.gram,
        witness_point,
        dual_y: sol.dual_y,
        gap: sol.gap,
        certified: sol.certified,
        starts_used: sol.starts_used,
    }
}

pub fn direction_grid(m: usize) -> Vec<f64> {
    (0..m).map(|k| TAU * k as f64 / m as f64).collect()
}

/// Support values on the uniform grid, evaluated in parallel with per-direction
/// seeds derived from the configured seed.
pub fn support_on_grid(a: &Matrix, m: usize, cfg: &SolverConfig) -> Vec<SupportResult> {
    direction_grid(m)
        .into_par_iter()
        .enumerate()
        .map(|(k, theta)| support_direction(a, theta, &cfg.with_seed(derive_seed(cfg.seed, k as u64))))
        .collect()
}

/// FNV-1a over the entry bits; stable across platforms and toolchains.
pub fn matrix_hash(a: &Matrix) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    feed(&(a.dim() as u64).to_le_bytes());
    for z in a.entries() {
        feed(&z.re.to_bits().to_le_bytes());
        feed(&z.im.to_bits().to_le_bytes());
    }
    format!("{h:016x}")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RangeBoundary {
    pub matrix_hash: String,
    pub samples: Vec<SupportResult>,
    /// Largest support value on the grid.
    pub radius: f64,
    /// Hull of the witness points; contained in W_c(A).
    pub inner: ConvexPolygon,
    /// Intersection of the certified half-planes; contains W_c(A).
    pub outer: ConvexPolygon,
    /// Indices of directions whose gap did not close.
    pub uncertified: Vec<usize>,
}

impl RangeBoundary {
    pub fn max_gap(&self) -> f64 {
        self.samples.iter().map(|s| s.gap).fold(0.0, f64::max)
    }

    pub fn all_certified(&self) -> bool {
        self.uncertified.is_empty()
    }

    /// Margin by which `p` satisfies every certified supporting half-plane.
    pub fn half_plane_margin(&self, p: Complex64) -> f64 {
        self.samples
            .iter()
            .map(|s| s.upper_bound() - (Complex64::from_polar(1.0, -s.theta) * p).re)
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn range_boundary(a: &Matrix, m: usize, cfg: &SolverConfig) -> Result<RangeBoundary> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 directions, got {m}")));
    }
    let samples = support_on_grid(a, m, cfg);
    let radius = samples.iter().map(|s| s.value).fold(f64::NEG_INFINITY, f64::max);
    let witnesses: Vec<Complex64> = samples.iter().map(|s| s.witness_point).collect();
    let lines: Vec<(f64, f64)> = samples.iter().map(|s| (s.theta, s.upper_bound())).collect();
    let uncertified = samples.iter().enumerate().filter(|(_, s)| !s.certified).map(|(k, _)| k).collect();
    Ok(RangeBoundary {
        matrix_hash: matrix_hash(a),
        samples,
        radius,
        inner: convex_hull(&witnesses),
        outer: ConvexPolygon::from_supporting_lines(&lines),
        uncertified,
    })
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on [lo, hi]; returns (argmax, max) over all evaluations.
fn golden_max(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, x_tol: f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > x_tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Angular resolution of the golden-section refinement.
const THETA_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadiusResult {
    pub radius: f64,
    pub theta: f64,
    /// radius + the certificate gap at the refined direction.
    pub upper: f64,
    pub support: SupportResult,
    pub certified: bool,
}

/// w_c(A) = max_θ h_A(θ): grid maximum refined by golden section.
pub fn wc_radius(a: &Matrix, m: usize, cfg: &SolverConfig) -> Result<RadiusResult> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 directions, got {m}")));
    }
    let samples = support_on_grid(a, m, cfg);
    let (k, best) = samples.iter().enumerate().max_by(|x, y| x.1.value.total_cmp(&y.1.value)).expect("m >= 3");
    let step = TAU / m as f64;
    let mut best = best.clone();
    let refine_cfg = cfg.with_seed(derive_seed(cfg.seed, (m + k) as u64));
    let mut all_certified = samples.iter().all(|s| s.certified);
    let (theta, _) =
        golden_max(|t| support_direction(a, t, &refine_cfg).value, best.theta - step, best.theta + step, THETA_TOL);
    let refined = support_direction(a, theta, &refine_cfg);
    all_certified &= refined.certified;
    if refined.value > best.value {
        best = refined;
    }
    Ok(RadiusResult {
        radius: best.value,
        theta: best.theta,
        upper: best.upper_bound(),
        certified: all_certified,
        support: best,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Membership {
    pub inside: bool,
    /// min_θ (h_A(θ) − Re(e^{−iθ}λ)) over the refined grid.
    pub margin: f64,
    pub theta: f64,
    /// Largest certificate gap among the evaluated directions.
    pub slack: f64,
}

const MEMBERSHIP_TOL: f64 = 1e-9;

/// Tests λ ∈ W_c(A) through the support function: λ ∈ W_c(A) iff
/// Re(e^{−iθ}λ) ≤ h_A(θ) for all θ.
pub fn contains(a: &Matrix, lambda: Complex64, m: usize, cfg: &SolverConfig) -> Result<Membership> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 directions, got {m}")));
    }
    let samples = support_on_grid(a, m, cfg);
    let excess = |s: &SupportResult| s.value - (Complex64::from_polar(1.0, -s.theta) * lambda).re;
    let (k, worst) = samples.iter().enumerate().min_by(|x, y| excess(x.1).total_cmp(&excess(y.1))).expect("m >= 3");
    let mut slack = samples.iter().map(|s| s.gap).fold(0.0, f64::max);
    let step = TAU / m as f64;
    let refine_cfg = cfg.with_seed(derive_seed(cfg.seed, (m + k) as u64));
    let (theta, neg_margin) = golden_max(
        |t| {
            let s = support_direction(a, t, &refine_cfg);
            -excess(&s)
        },
        worst.theta - step,
        worst.theta + step,
        THETA_TOL,
    );
    let refined = support_direction(a, theta, &refine_cfg);
    slack = slack.max(refined.gap);
    let (margin, theta) = if -neg_margin < excess(worst) { (-neg_margin, theta) } else { (excess(worst), worst.theta) };

    let inside = margin >= -MEMBERSHIP_TOL;
    if !inside && margin + slack >= -MEMBERSHIP_TOL {
        return Err(Error::Inconclusive { margin, slack });
    }
    Ok(Membership { inside, margin, theta, slack })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimumResult {
    /// Primal value: min W_c(A) ≤ minimum.
    pub minimum: f64,
    /// Dual value: min W_c(A) ≥ lower_bound.
    pub lower_bound: f64,
    /// The underlying solve of max τ_n(−Re(A) B).
    pub support: SupportResult,
}

/// W_c(A) ⊂ ℝ iff Im A is diagonal with τ_n(Im A) = 0. Returns the offending
/// quantities when the screen fails.
pub fn real_range_screen(a: &Matrix) -> Result<(Matrix, Matrix)> {
    let (re, im) = a.hermitian_parts();
    let off_diagonal = im.off_diagonal_norm();
    let trace = im.normalized_trace().re;
    let scale = 1.0 + a.frobenius_norm();
    if off_diagonal > 1e-10 * scale || trace.abs() > 1e-10 {
        return Err(Error::RangeNotReal { off_diagonal, trace });
    }
    Ok((re, im))
}

/// Certified min W_c(A) for a matrix whose range is real.
pub fn min_real_value(a: &Matrix, cfg: &SolverConfig) -> Result<MinimumResult> {
    let (re, _) = real_range_screen(a)?;
    let support = support_direction(&re.scale_real(-1.0), 0.0, cfg);
    Ok(MinimumResult { minimum: -support.value, lower_bound: -support.upper_bound(), support })
}

/// Support function of the classical numerical range W(A): λ_max(H_θ).
pub fn classical_support(a: &Matrix, theta: f64) -> f64 {
    a.rotated_hermitian(theta).hermitian_eigs().expect("H_θ is Hermitian").max()
}

/// Classical numerical radius w(A) = max_θ λ_max(H_θ), grid plus golden section.
pub fn classical_radius(a: &Matrix, m: usize) -> f64 {
    let grid = direction_grid(m);
    let (k, best) = grid
        .iter()
        .map(|&t| classical_support(a, t))
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("nonempty grid");
    let step = TAU / m as f64;
    let (_, refined) = golden_max(|t| classical_support(a, t), grid[k] - step, grid[k] + step, THETA_TOL);
    best.max(refined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptope::{correlation_2x2, PSD_TOL};
    use crate::matcore::{random_hermitian, seeded_rng};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Brute-force oracle over ℰ_2 = {[[1, z], [z̄, 1]] : |z| ≤ 1}. The
    /// objective is affine in z, so the maximum sits on |z| = 1.
    fn disk_oracle(a: &Matrix, theta: f64) -> f64 {
        let rot = Complex64::from_polar(1.0, -theta);
        (0..20_000)
            .map(|k| {
                let z = Complex64::from_polar(1.0, TAU * k as f64 / 20_000.0);
                let b = correlation_2x2(z).unwrap();
                (rot * (a * b.matrix()).normalized_trace()).re
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn nilpotent_support_is_one_half() {
        let a = Matrix::unit(2, 0, 1);
        let cfg = SolverConfig::default();
        for k in 0..12 {
            let theta = 0.37 * k as f64;
            let s = support_direction(&a, theta, &cfg);
            assert!((s.value - 0.5).abs() < 1e-12, "θ = {theta}: {}", s.value);
            assert!(s.certified);
        }
    }

    #[test]
    fn diagonal_support_is_rotated_trace() {
        let a = Matrix::from_diagonal(&[c(1.0, 2.0), c(-3.0, 0.5), c(0.25, -1.0)]);
        let tau = a.normalized_trace();
        for theta in direction_grid(7) {
            let s = support_direction(&a, theta, &SolverConfig::default());
            assert!((s.value - (Complex64::from_polar(1.0, -theta) * tau).re).abs() < 1e-14);
            assert!(s.gap.abs() < 1e-12);
        }
    }

    #[test]
    fn two_by_two_ellipse_axes_match_oracle() {
        let a = Matrix::from_real_rows(&[&[0.0, 2.0], &[1.0, 0.0]]);
        let cfg = SolverConfig::default();
        let s0 = support_direction(&a, 0.0, &cfg);
        let s1 = support_direction(&a, PI / 2.0, &cfg);
        assert!((disk_oracle(&a, 0.0) - 1.5).abs() < 1e-6);
        assert!((disk_oracle(&a, PI / 2.0) - 0.5).abs() < 1e-6);
        assert!((s0.value - 1.5).abs() < 1e-12);
        assert!((s1.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn random_two_by_two_matches_oracle() {
        let mut rng = seeded_rng(4);
        for _ in 0..5 {
            let a = crate::matcore::ginibre_random(2, &mut rng);
            for theta in [0.0, 1.0, 2.5, 4.0] {
                let s = support_direction(&a, theta, &SolverConfig::default());
                // the z-grid has resolution 2π/20000, so it under-reports by at most O(1e-7)
                let oracle = disk_oracle(&a, theta);
                assert!(s.value >= oracle - 1e-12 && s.value - oracle < 1e-6);
            }
        }
    }

    #[test]
    fn certificate_invariants_on_random_hermitian() {
        let mut rng = seeded_rng(21);
        for n in 2..=6 {
            for _ in 0..4 {
                let h = random_hermitian(n, &mut rng);
                let s = support_direction(&h, 0.0, &SolverConfig::default());
                let slack = &Matrix::from_real_diagonal(&s.dual_y) - &h;
                assert!(slack.hermitian_eigs().unwrap().min() >= -PSD_TOL);
                let dual = s.dual_y.iter().sum::<f64>() / n as f64;
                assert!((dual - s.value - s.gap).abs() < 1e-12);
                assert!(s.gap >= -1e-10);
                assert!((s.witness_point.re - s.value).abs() < 1e-10);
                assert!(s.certified, "n = {n}, gap {}", s.gap);
            }
        }
    }

    #[test]
    fn boundary_of_nilpotent_is_disk() {
        let a = Matrix::unit(2, 0, 1);
        let m = 64;
        let b = range_boundary(&a, m, &SolverConfig::default()).unwrap();
        assert!(b.all_certified());
        let gap = crate::geometry::hausdorff(&b.inner, &b.outer);
        assert!(gap <= 2.0 * (PI / m as f64).powi(2), "{gap}");
        assert!((b.radius - 0.5).abs() < 1e-12);
    }

    #[test]
    fn boundary_of_diagonal_is_a_point() {
        let a = Matrix::from_real_diagonal(&[1.0, 3.0]);
        let b = range_boundary(&a, 8, &SolverConfig::default()).unwrap();
        for s in &b.samples {
            assert!((s.witness_point - c(2.0, 0.0)).norm() < 1e-14);
        }
        assert!(range_boundary(&a, 2, &SolverConfig::default()).is_err());
    }

    #[test]
    fn radius_examples() {
        let cfg = SolverConfig::default();
        let r = wc_radius(&Matrix::unit(2, 0, 1), 32, &cfg).unwrap();
        assert!((r.radius - 0.5).abs() < 1e-10);
        let d = Matrix::from_diagonal(&[c(1.0, 1.0), c(2.0, -3.0), c(0.0, 0.5)]);
        let r = wc_radius(&d, 32, &cfg).unwrap();
        assert!((r.radius - d.normalized_trace().norm()).abs() < 1e-8);
        let w = Matrix::unit(2, 0, 1).direct_sum(&Matrix::zeros(1));
        let r = wc_radius(&w, 32, &cfg).unwrap();
        assert!((r.radius - 1.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn membership_examples() {
        let a = Matrix::unit(2, 0, 1);
        let cfg = SolverConfig::default();
        assert!(contains(&a, c(0.4, 0.0), 32, &cfg).unwrap().inside);
        let out = contains(&a, c(0.6, 0.0), 32, &cfg).unwrap();
        assert!(!out.inside);
        assert!((out.margin + 0.1).abs() < 1e-9);
        let mut rng = seeded_rng(2);
        for n in 1..5 {
            let a = crate::matcore::ginibre_random(n, &mut rng);
            assert!(contains(&a, a.normalized_trace(), 32, &cfg).unwrap().inside);
        }
    }

    #[test]
    fn min_real_value_examples() {
        let cfg = SolverConfig::default();
        let m = min_real_value(&Matrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]), &cfg).unwrap();
        assert!(m.minimum.abs() < 1e-12 && m.lower_bound <= m.minimum);
        let m = min_real_value(&Matrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]), &cfg).unwrap();
        assert!((m.minimum + 1.0).abs() < 1e-12);
        let m = min_real_value(&Matrix::from_real_diagonal(&[1.0, -1.0]), &cfg).unwrap();
        assert!(m.minimum.abs() < 1e-15);
        assert!(matches!(min_real_value(&Matrix::unit(2, 0, 1), &cfg), Err(Error::RangeNotReal { .. })));
        let shifted = Matrix::from_diagonal(&[c(0.0, 1.0), c(0.0, 1.0)]);
        assert!(matches!(min_real_value(&shifted, &cfg), Err(Error::RangeNotReal { .. })));
        let imag_traceless = Matrix::from_diagonal(&[c(1.0, 1.0), c(1.0, -1.0)]);
        assert!(min_real_value(&imag_traceless, &cfg).is_ok());
    }

    #[test]
    fn classical_support_examples() {
        let a = Matrix::unit(2, 0, 1);
        for theta in [0.0, 1.0, 3.0] {
            assert!((classical_support(&a, theta) - 0.5).abs() < 1e-14);
        }
        let h = Matrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        assert!((classical_support(&h, 0.0) - 3.0).abs() < 1e-13);
        let d = Matrix::from_real_diagonal(&[0.0, 1.0]);
        assert!((classical_support(&d, 0.0) - 1.0).abs() < 1e-15);
        let s = support_direction(&d, 0.0, &SolverConfig::default());
        assert!((s.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn seeds_make_results_reproducible() {
        let a = crate::matcore::ginibre_random(4, &mut seeded_rng(9));
        let cfg = SolverConfig::default().with_seed(77);
        let x = range_boundary(&a, 16, &cfg).unwrap();
        let y = range_boundary(&a, 16, &cfg).unwrap();
        for (s, t) in x.samples.iter().zip(&y.samples) {
            assert_eq!(s.value.to_bits(), t.value.to_bits());
            assert_eq!(s.dual_y, t.dual_y);
        }
        assert_eq!(x.matrix_hash, y.matrix_hash);
    }
}

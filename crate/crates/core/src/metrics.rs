//! The quotient seminorm ‖T‖_c = inf_{D ∈ 𝒟_{n,0}} ‖T − D‖, searches for small
//! ratios w_c(T)/‖T‖_c, and the direct-sum law for W_c.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, hausdorff};
use crate::matcore::{derive_seed, ginibre_random, seeded_rng, top_singular, Matrix};
use crate::range::{support_on_grid, wc_radius, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeminormConfig {
    /// Stop once the certified bracket is narrower than tol·(1 + ‖T‖).
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SeminormConfig {
    fn default() -> Self {
        Self { tol: 1e-9, max_iterations: 50_000 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeminormResult {
    /// ‖T − D̂‖ for the best D̂ found; an upper bound on ‖T‖_c.
    pub value: f64,
    /// Certified lower bound on ‖T‖_c.
    pub lower_bound: f64,
    /// The minimizing trace-zero diagonal D̂.
    pub d: Matrix,
    pub iterations: usize,
    pub converged: bool,
}

/// Trace-zero diagonal from 2(n−1) reals: d_i = x_2i + i·x_2i+1 for i < n−1,
/// and d_{n−1} = −Σ d_i.
fn diagonal_from_params(n: usize, x: &[f64]) -> Matrix {
    let mut d: Vec<Complex64> = x.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
    let last = -d.iter().sum::<Complex64>();
    d.push(last);
    debug_assert_eq!(d.len(), n);
    Matrix::from_diagonal(&d)
}

/// σ_max(T − D(x)) and a subgradient in x.
fn norm_and_subgradient(t: &Matrix, x: &[f64]) -> (f64, Vec<f64>) {
    let n = t.dim();
    let m = t - &diagonal_from_params(n, x);
    let top = top_singular(&m);
    // σ = Re(u*(T − D)v), so ∂σ/∂d_i = −conj(u_i)·v_i in the Wirtinger sense
    let w: Vec<Complex64> = top.left.iter().zip(&top.right).map(|(u, v)| u.conj() * v).collect();
    let mut g = Vec::with_capacity(2 * (n - 1));
    for i in 0..n - 1 {
        g.push(-w[i].re + w[n - 1].re);
        g.push(w[i].im - w[n - 1].im);
    }
    (top.sigma, g)
}

/// Central-cut ellipsoid method on the convex map x ↦ ‖T − D(x)‖. Every
/// iterate yields f* ≥ f(x_k) − √(g_kᵀ P_k g_k), so the bracket is certified.
pub fn c_seminorm(t: &Matrix, cfg: &SeminormConfig) -> SeminormResult {
    let n = t.dim();
    if n == 1 {
        let v = t[(0, 0)].norm();
        return SeminormResult { value: v, lower_bound: v, d: Matrix::zeros(1), iterations: 0, converged: true };
    }
    let p = 2 * (n - 1);
    let norm = t.operator_norm();
    if norm == 0.0 {
        return SeminormResult { value: 0.0, lower_bound: 0.0, d: Matrix::zeros(n), iterations: 0, converged: true };
    }
    // |d_i| ≤ |T_ii| + ‖T‖ ≤ 2‖T‖ at any minimizer
    let radius = 2.0 * norm * (n as f64).sqrt() * 1.01;
    let mut x = vec![0.0; p];
    let mut shape = vec![0.0; p * p];
    for i in 0..p {
        shape[i * p + i] = radius * radius;
    }
    let pf = p as f64;
    let expand = pf * pf / (pf * pf - 1.0);
    let target = cfg.tol * (1.0 + norm);

    let (mut best_value, _) = norm_and_subgradient(t, &x);
    let mut best_x = x.clone();
    let mut lower = 0.0f64;
    let mut iterations = 0;
    while iterations < cfg.max_iterations && best_value - lower > target {
        iterations += 1;
        let (f, g) = norm_and_subgradient(t, &x);
        if f < best_value {
            best_value = f;
            best_x.clone_from(&x);
        }
        let pg: Vec<f64> = (0..p).map(|i| (0..p).map(|j| shape[i * p + j] * g[j]).sum()).collect();
        let gpg: f64 = g.iter().zip(&pg).map(|(a, b)| a * b).sum();
        if gpg <= 0.0 {
            // zero subgradient: x is optimal
            lower = lower.max(f);
            break;
        }
        let width = gpg.sqrt();
        lower = lower.max(f - width);
        let b: Vec<f64> = pg.iter().map(|v| v / width).collect();
        for i in 0..p {
            x[i] -= b[i] / (pf + 1.0);
        }
        for i in 0..p {
            for j in 0..=i {
                let v = expand * (shape[i * p + j] - 2.0 / (pf + 1.0) * b[i] * b[j]);
                shape[i * p + j] = v;
                shape[j * p + i] = v;
            }
        }
    }
    SeminormResult {
        value: best_value,
        lower_bound: lower.min(best_value),
        d: diagonal_from_params(n, &best_x),
        iterations,
        converged: best_value - lower <= target,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KappaEstimate {
    pub n: usize,
    /// Smallest w_c(T)/‖T‖_c found (computed as upper/lower bound ratio).
    pub best_ratio: f64,
    pub witness: Matrix,
    /// 1/(4n+2).
    pub lower_bound: f64,
    /// 2/n, the upper bound claimed via the witness e₁₂ ⊕ 0.
    pub claimed_upper: f64,
    /// The ratio computed for e₁₂ ⊕ 0 itself.
    pub witness_ratio: f64,
    pub evaluations: usize,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KappaConfig {
    /// Directions for the radius during the search.
    pub directions: usize,
    pub solver: SolverConfig,
    pub seminorm: SeminormConfig,
}

impl Default for KappaConfig {
    fn default() -> Self {
        Self { directions: 64, solver: SolverConfig::default(), seminorm: SeminormConfig::default() }
    }
}

/// w_c(T)/‖T‖_c, rounded up: certified radius over certified seminorm lower bound.
pub fn radius_ratio(t: &Matrix, cfg: &KappaConfig) -> Result<f64> {
    let c = c_seminorm(t, &cfg.seminorm);
    if c.lower_bound <= 0.0 {
        return Err(Error::InvalidArgument("T is a trace-zero diagonal; ratio undefined".into()));
    }
    let w = wc_radius(t, cfg.directions, &cfg.solver)?;
    Ok(w.upper / c.lower_bound)
}

/// e₁₂ ⊕ 0_{n−2}.
pub fn sparse_witness(n: usize) -> Matrix {
    Matrix::unit(n, 0, 1)
}

/// Random and local search for small w_c(T)/‖T‖_c. `budget` counts ratio evaluations.
pub fn kappa_upper_search(n: usize, budget: usize, seed: u64, cfg: &KappaConfig) -> Result<KappaEstimate> {
    if n < 2 {
        return Err(Error::InvalidArgument("κ_n needs n ≥ 2".into()));
    }
    let mut rng = seeded_rng(seed);
    let mut evaluations = 0;
    let eval = |t: &Matrix, evaluations: &mut usize| -> Option<f64> {
        *evaluations += 1;
        radius_ratio(t, cfg).ok()
    };

    let witness = sparse_witness(n);
    let witness_ratio = eval(&witness, &mut evaluations).expect("witness has positive seminorm");
    let mut best = (witness_ratio, witness.clone());

    // random starts: dense Ginibre and sparse single entries
    let starts = (budget / 3).max(1);
    for s in 0..starts {
        if evaluations >= budget {
            break;
        }
        let t = if s % 2 == 0 {
            ginibre_random(n, &mut rng)
        } else {
            let i = rng.random_range(0..n);
            let j = (i + rng.random_range(1..n)) % n;
            let mut t = ginibre_random(n, &mut rng).scale_real(0.1);
            t[(i, j)] = Complex64::from_polar(1.0, rng.random_range(0.0..TAU));
            t
        };
        if let Some(r) = eval(&t, &mut evaluations) {
            if r < best.0 {
                best = (r, t);
            }
        }
    }

    // local search around the incumbent
    let mut step = 0.3;
    while evaluations < budget && step > 1e-4 {
        let direction = ginibre_random(n, &mut rng);
        let scale = best.1.operator_norm().max(1e-12) * step / direction.operator_norm();
        let candidate = &best.1 + &direction.scale_real(scale);
        match eval(&candidate, &mut evaluations) {
            Some(r) if r < best.0 => {
                best = (r, candidate);
                step *= 1.5;
            }
            _ => step *= 0.7,
        }
    }

    // normalize the witness to ‖T‖_c = 1 and re-certify on a finer grid
    let c = c_seminorm(&best.1, &cfg.seminorm);
    let witness_out = best.1.scale_real(1.0 / c.value);
    let fine = KappaConfig { directions: cfg.directions.max(256), ..cfg.clone() };
    let best_ratio = radius_ratio(&witness_out, &fine)?.max(best.0);

    let lower_bound = 1.0 / (4.0 * n as f64 + 2.0);
    let claimed_upper = 2.0 / n as f64;
    let mut flags = Vec::new();
    if best_ratio < lower_bound - 1e-6 {
        flags.push(format!("ratio {best_ratio:.9} falls below the lower bound 1/(4n+2) = {lower_bound:.9}"));
    }
    if (witness_ratio - claimed_upper).abs() > 1e-6 {
        flags.push(format!(
            "witness e12 ⊕ 0 has w_c/‖·‖_c = {witness_ratio:.9} (1/n = {:.9}), not the claimed 2/n = {claimed_upper:.9}",
            1.0 / n as f64
        ));
    }
    Ok(KappaEstimate {
        n,
        best_ratio,
        witness: witness_out,
        lower_bound,
        claimed_upper,
        witness_ratio,
        evaluations,
        flags,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectSumReport {
    pub k1: usize,
    pub k2: usize,
    /// max_θ |h_{S₁⊕S₂}(θ) − (k₁/n)h_{S₁}(θ) − (k₂/n)h_{S₂}(θ)| on the grid.
    pub max_support_error: f64,
    /// Hausdorff distance between the inner polygons of W_c(S₁⊕S₂) and of the
    /// Minkowski combination.
    pub polygon_hausdorff: f64,
    /// Largest support value of S₁⊕S₂ on the grid.
    pub radius: f64,
    pub all_certified: bool,
}

/// W_c(S₁ ⊕ S₂) = (k₁/n)W_c(S₁) + (k₂/n)W_c(S₂), checked direction by direction.
pub fn direct_sum_check(s1: &Matrix, s2: &Matrix, m: usize, cfg: &SolverConfig) -> Result<DirectSumReport> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 directions, got {m}")));
    }
    let (k1, k2) = (s1.dim(), s2.dim());
    let n = (k1 + k2) as f64;
    let (w1, w2) = (k1 as f64 / n, k2 as f64 / n);
    let whole = support_on_grid(&s1.direct_sum(s2), m, &cfg.with_seed(derive_seed(cfg.seed, 0)));
    let first = support_on_grid(s1, m, &cfg.with_seed(derive_seed(cfg.seed, 1)));
    let second = support_on_grid(s2, m, &cfg.with_seed(derive_seed(cfg.seed, 2)));

    let max_support_error = whole
        .iter()
        .zip(first.iter().zip(&second))
        .map(|(h, (a, b))| (h.value - w1 * a.value - w2 * b.value).abs())
        .fold(0.0, f64::max);
    // support points add under Minkowski sums
    let combined: Vec<Complex64> =
        first.iter().zip(&second).map(|(a, b)| a.witness_point * w1 + b.witness_point * w2).collect();
    let whole_points: Vec<Complex64> = whole.iter().map(|s| s.witness_point).collect();
    let polygon_hausdorff = hausdorff(&convex_hull(&whole_points), &convex_hull(&combined));
    let all_certified = whole.iter().chain(&first).chain(&second).all(|s| s.certified);
    Ok(DirectSumReport {
        k1,
        k2,
        max_support_error,
        polygon_hausdorff,
        radius: whole.iter().map(|s| s.value).fold(f64::NEG_INFINITY, f64::max),
        all_certified,
    })
}

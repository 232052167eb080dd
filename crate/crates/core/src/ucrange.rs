//! Unitarily induced correlation matrices 𝓕_n and inner approximations of
//! W_uc(T) = co{τ_n(TB) : B ∈ 𝓕_n}.
//!
//! A tuple of k×k unitaries (U_1, …, U_n) is a family of unit vectors for the
//! trace inner product ⟨X, Y⟩ = τ_k(Y*X), and B_ij = τ_k(U_j* U_i) is their Gram
//! matrix, so 𝓕_n ⊂ ℰ_n. 𝓕_n is not convex. A weighted average of induced
//! matrices is a [`MixedCorrelation`], a point of co𝓕_n, never a member of 𝓕_n.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elliptope::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::geometry::{convex_hull, ConvexPolygon};
use crate::matcore::{derive_seed, haar_unitary, permutation_matrix, random_permutation, seeded_rng, Matrix};
use crate::range::{range_boundary, SolverConfig};

const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryTuple {
    k: usize,
    unitaries: Vec<Matrix>,
}

impl UnitaryTuple {
    pub fn new(unitaries: Vec<Matrix>) -> Result<Self> {
        let k = unitaries.first().map(Matrix::dim).ok_or_else(|| Error::InvalidArgument("empty tuple".into()))?;
        for (index, u) in unitaries.iter().enumerate() {
            if u.dim() != k {
                return Err(Error::DimensionMismatch(format!("unitary {index} is {0}×{0}, expected {k}×{k}", u.dim())));
            }
            let deviation = (&(&u.adjoint() * u) - &Matrix::identity(k)).frobenius_norm();
            if deviation > UNITARY_TOL {
                return Err(Error::NotUnitary { index, deviation });
            }
        }
        Ok(Self { k, unitaries })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.unitaries.len()
    }

    pub fn unitaries(&self) -> &[Matrix] {
        &self.unitaries
    }

    /// n independent Haar unitaries of size k.
    pub fn haar<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Self {
        Self { k, unitaries: (0..n).map(|_| haar_unitary(k, rng)).collect() }
    }

    /// Commuting diagonal unitaries U_i = diag(e^{iφ_i1}, …, e^{iφ_ik}).
    pub fn diagonal_phases(phases: &[Vec<f64>]) -> Result<Self> {
        let k = phases.first().map(Vec::len).unwrap_or(0);
        if k == 0 || phases.iter().any(|p| p.len() != k) {
            return Err(Error::DimensionMismatch("phase rows must share a positive length".into()));
        }
        let unitaries = phases
            .iter()
            .map(|p| Matrix::from_diagonal(&p.iter().map(|&t| Complex64::from_polar(1.0, t)).collect::<Vec<_>>()))
            .collect();
        Ok(Self { k, unitaries })
    }

    /// Phase-weighted random permutation matrices.
    pub fn permutations<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Self {
        let unitaries = (0..n)
            .map(|_| {
                let phase = Complex64::from_polar(1.0, rng.random_range(0.0..TAU));
                permutation_matrix(&random_permutation(k, rng)).scale(phase)
            })
            .collect();
        Self { k, unitaries }
    }
}

/// B_ij = τ_k(U_j* U_i).
pub fn induced_correlation(t: &UnitaryTuple) -> CorrelationMatrix {
    let n = t.n();
    let k = t.k as f64;
    let u = &t.unitaries;
    let mut b = Matrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            let z: Complex64 =
                u[i].entries().iter().zip(u[j].entries()).map(|(x, y)| x * y.conj()).sum::<Complex64>() / k;
            b[(i, j)] = z;
            b[(j, i)] = z.conj();
        }
    }
    CorrelationMatrix::from_matrix_unchecked(b)
}

/// A convex combination of correlation matrices: a point of co𝓕_n when the
/// inputs are induced, but not in general an element of 𝓕_n.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedCorrelation(Matrix);

impl MixedCorrelation {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

pub fn convex_combination(parts: &[(f64, CorrelationMatrix)]) -> Result<MixedCorrelation> {
    let first = parts.first().ok_or_else(|| Error::InvalidArgument("no matrices to combine".into()))?;
    let total: f64 = parts.iter().map(|(w, _)| w).sum();
    if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument("weights must be nonnegative and sum to 1".into()));
    }
    let mut m = Matrix::zeros(first.1.dim());
    for (w, b) in parts {
        m = &m + &b.matrix().scale_real(*w);
    }
    Ok(MixedCorrelation(m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Haar,
    /// Random commuting diagonal phases.
    DiagonalPhase,
    /// Two-phase diagonal tuples whose phase averages sweep the unit disk.
    DiskPhase,
    Permutation,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SampleMeta {
    pub k_values: Vec<usize>,
    pub counts: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WucApproximation {
    pub points: Vec<Complex64>,
    pub hull: ConvexPolygon,
    pub sample_meta: SampleMeta,
}

pub const DEFAULT_K_LIST: [usize; 5] = [1, 2, 4, 8, 16];

/// Tuple whose first unitary is I_k and whose others have phase averages
/// r_i·e^{iα_i}: half the diagonal at α_i + arccos(r_i), half at α_i − arccos(r_i).
/// For n = 2 this reaches every B ∈ ℰ_2 once k is even.
fn disk_phase_tuple<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> UnitaryTuple {
    let mut phases = vec![vec![0.0; k]];
    for _ in 1..n {
        let alpha = rng.random_range(0.0..TAU);
        // bias toward the boundary, where the extreme points live
        let r: f64 = if rng.random_bool(0.5) { 1.0 } else { rng.random::<f64>().sqrt() };
        let spread = if k.is_multiple_of(2) { r.clamp(-1.0, 1.0).acos() } else { 0.0 };
        phases.push((0..k).map(|l| if l % 2 == 0 { alpha + spread } else { alpha - spread }).collect());
    }
    UnitaryTuple::diagonal_phases(&phases).expect("rectangular phases")
}

fn sample_tuple(n: usize, k: usize, generator: Generator, seed: u64) -> UnitaryTuple {
    let mut rng = seeded_rng(seed);
    match generator {
        Generator::Haar => UnitaryTuple::haar(n, k, &mut rng),
        Generator::DiagonalPhase => {
            let phases: Vec<Vec<f64>> = (0..n).map(|_| (0..k).map(|_| rng.random_range(0.0..TAU)).collect()).collect();
            UnitaryTuple::diagonal_phases(&phases).expect("rectangular phases")
        }
        Generator::DiskPhase => disk_phase_tuple(n, k, &mut rng),
        Generator::Permutation => UnitaryTuple::permutations(n, k, &mut rng),
    }
}

/// Monte-Carlo inner approximation of W_uc(T). Sample s uses generator s mod 4
/// and inner dimension k_list[(s / 4) mod len], with seed derived from (seed, s).
pub fn wuc_inner(t: &Matrix, k_list: &[usize], samples: usize, seed: u64) -> Result<WucApproximation> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    if k_list.is_empty() || k_list.contains(&0) {
        return Err(Error::InvalidArgument("k_list must contain positive sizes".into()));
    }
    const GENERATORS: [Generator; 4] =
        [Generator::Haar, Generator::DiagonalPhase, Generator::DiskPhase, Generator::Permutation];
    let n = t.dim();
    let drawn: Vec<(Generator, usize, Complex64)> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let generator = GENERATORS[s % 4];
            let k = k_list[(s / 4) % k_list.len()];
            let tuple = sample_tuple(n, k, generator, derive_seed(seed, s as u64));
            let b = induced_correlation(&tuple);
            (generator, k, (t * b.matrix()).normalized_trace())
        })
        .collect();

    let mut meta = SampleMeta { k_values: k_list.to_vec(), counts: BTreeMap::new() };
    for (generator, k, _) in &drawn {
        let name = serde_json::to_value(generator).expect("unit enum");
        *meta.counts.entry(format!("{}/k={k}", name.as_str().unwrap_or("?"))).or_default() += 1;
    }
    let points: Vec<Complex64> = drawn.into_iter().map(|(_, _, p)| p).collect();
    Ok(WucApproximation { hull: convex_hull(&points), points, sample_meta: meta })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareConfig {
    pub directions: usize,
    pub k_list: Vec<usize>,
    pub samples: usize,
    pub solver: SolverConfig,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { directions: 256, k_list: DEFAULT_K_LIST.to_vec(), samples: 2000, solver: SolverConfig::default() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WucComparison {
    pub n: usize,
    /// min over sampled points and certified half-planes of W_c(T); ≥ −1e-8 always.
    pub inclusion_margin: f64,
    /// Distance from the W_c inner polygon (true points of W_c) to the hull.
    pub deficit_lower: f64,
    /// Distance from the W_c outer polygon to the hull; bounds the true deficit.
    pub deficit_upper: f64,
    pub approximation: WucApproximation,
    /// Whether W_uc = W_c is known to hold at this n, making the deficit a
    /// convergence diagnostic rather than a possible separation.
    pub equality_known: bool,
}

pub fn compare_wc_wuc(t: &Matrix, cfg: &CompareConfig) -> Result<WucComparison> {
    let boundary = range_boundary(t, cfg.directions, &cfg.solver)?;
    let approximation = wuc_inner(t, &cfg.k_list, cfg.samples, cfg.solver.seed)?;
    let inclusion_margin =
        approximation.points.iter().map(|&p| boundary.half_plane_margin(p)).fold(f64::INFINITY, f64::min);
    Ok(WucComparison {
        n: t.dim(),
        inclusion_margin,
        deficit_lower: boundary.inner.excess_over(&approximation.hull),
        deficit_upper: boundary.outer.excess_over(&approximation.hull),
        approximation,
        equality_known: t.dim() <= 3,
    })
}

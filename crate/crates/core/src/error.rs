use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (‖M − M*‖ = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {off_diagonal:.3e})")]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("matrix is not positive semidefinite (λ_min = {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("diagonal entry {index} is {value}, expected 1")]
    DiagonalNotOne { index: usize, value: f64 },

    #[error("|z| = {modulus} lies outside the closed unit disk")]
    OutOfDisk { modulus: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("unitary {index} deviates from unitarity by {deviation:.3e}")]
    NotUnitary { index: usize, deviation: f64 },

    #[error("duality gap {gap:.3e} exceeds tolerance {tol:.3e} after {restarts} restarts")]
    GapNotClosed { gap: f64, tol: f64, restarts: usize },

    #[error("range is not real: Im A has off-diagonal mass {off_diagonal:.3e}, τ_n(Im A) = {trace:.3e}")]
    RangeNotReal { off_diagonal: f64, trace: f64 },

    #[error("not decomposable: dual optimum {dual_value:.3e} < 0 (primal witness value {primal_value:.3e})")]
    NotDecomposable { dual_value: f64, primal_value: f64 },

    #[error("membership inconclusive: margin {margin:.3e} within certificate slack {slack:.3e}")]
    Inconclusive { margin: f64, slack: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cancelled")]
    Cancelled,

    #[error("parse error: {0}")]
    Parse(String),
}

//! Correlation numerical ranges W_c(A) = {τ_n(AB) : B a correlation matrix}.
//!
//! Every support-function evaluation carries a primal point and a dual
//! diagonal certificate, so reported values come with two-sided bounds.

pub mod decompose;
pub mod elliptope;
pub mod error;
pub mod geometry;
pub mod invariants;
pub mod io;
pub mod matcore;
pub mod metrics;
pub mod range;
pub mod ucrange;

pub use error::{Error, Result};
pub use matcore::{ComplexScalar, Matrix};

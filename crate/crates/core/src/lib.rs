//! Independent-set landscapes, classical Monte Carlo runtime bounds and
//! quantum adiabatic spectral gaps for maximum independent set problems.

pub mod classical_mc;
pub mod error;
pub mod graphs;
pub mod landscape;
pub mod linalg;
pub mod qmc;
pub mod real;
pub mod rng;
pub mod spectral;
pub mod star_models;
pub mod tight_binding;
pub mod tolerances;

pub use error::{Error, Result};
pub use real::Real;

/// Chain model in double precision.
pub type Chain = tight_binding::ChainModel<f64>;
/// Sparse matrix in double precision.
pub type Csr = linalg::CsrMatrix<f64>;
/// Symmetric tridiagonal matrix in double precision.
pub type Tridiagonal = linalg::tridiag::SymTridiagonal<f64>;

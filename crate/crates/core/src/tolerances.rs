//! Numerical tolerances and default limits shared across modules.

/// Relative gap below which two levels are treated as degenerate.
pub const DEGENERACY: f64 = 1e-8;
/// Eigenpair residual target, relative to the operator norm.
pub const EIGEN_RESIDUAL: f64 = 1e-9;
/// Largest dimension handed to the dense symmetric eigensolver.
pub const DENSE_LIMIT: usize = 2048;
/// Largest dimension for which gap scans diagonalize densely.
pub const SCAN_DENSE_LIMIT: usize = 600;
/// Upper bound on stored nonzeros of an assembled operator.
pub const NNZ_LIMIT: usize = 20_000_000;
/// Coarse grid size of the minimum-gap scan.
pub const SCAN_GRID: usize = 64;
/// Relative tolerance of the golden-section refinement.
pub const GOLDEN_REL_TOL: f64 = 1e-6;
/// Finite-difference step for resolvent slopes, relative to |E*|.
pub const FD_REL_STEP: f64 = 1e-4;
/// Agreement required between the two finite-difference estimates.
pub const FD_AGREEMENT: f64 = 1e-5;
/// Relative residual of the projected resolvent solve.
pub const RESOLVENT_RESIDUAL: f64 = 1e-12;
/// Number of configurations enumerated before giving up.
pub const ENUMERATION_LIMIT: usize = 5_000_000;
/// Memo entries of the independence-polynomial counter before giving up.
pub const COUNT_MEMO_LIMIT: usize = 4_000_000;
/// Largest configuration graph handed to the dense Laplacian solver.
pub const LAPLACIAN_DENSE_LIMIT: usize = 2000;

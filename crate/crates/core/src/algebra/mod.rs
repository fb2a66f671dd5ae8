//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here operates on [`ComplexMatrix`], a small row-major dense
//! matrix. Sizes of interest are at most a few dozen rows (superoperators of
//! 4-level systems are 16×16), so no attempt is made at blocking or sparsity.

mod basis;
mod decomp;
mod eigen;
mod expm;
mod matrix;
mod minpoly;
mod tolerance;

pub use basis::hermitian_basis;
pub use decomp::{
    hermitian_eigen, hermitian_eigenvalues, kernel_dim, lstsq, rank, singular_values, solve,
};
pub use eigen::eigenvalues;
pub use expm::expm;
pub use matrix::{hs_inner, kron, unvec, vec, ComplexMatrix};
pub use minpoly::{eval_poly, eval_poly_matrix, minimal_polynomial};
pub use tolerance::ToleranceConfig;

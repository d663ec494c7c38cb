//! Dense complex linear-algebra kernels.
//!
//! Everything downstream works with [`CMatrix`]; the heavy lifting
//! (GEMM, Cholesky, hermitian eigensolver, SVD, LU) is delegated to `faer`.

mod blocks;
mod decomp;
mod matrix;
mod sparse;
pub mod text;

pub use blocks::BlockDiagonal;
pub use decomp::{
    gen_eig_max, gen_eig_max_vector, herm_eig, herm_eigvals, inverse, op_norm, resolvent, GenEigMax, HermEig,
    GRAM_ROUTE_MIN_DIM,
};
pub use matrix::{inner, vec_norm, CMatrix};
pub use sparse::BlockSparse;

/// Relative hermiticity tolerance, `‖M - M*‖_F ≤ tol · ‖M‖_F`.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum LinopsError {
    #[error("matrix shape {rows}x{cols} is empty")]
    EmptyShape { rows: usize, cols: usize },
    #[error("{rows}x{cols} matrix needs {} entries, got {found}", rows * cols)]
    EntryCount { rows: usize, cols: usize, found: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not hermitian: ‖M - M*‖ = {residual:e} with ‖M‖ = {norm:e}")]
    NotHermitian { residual: f64, norm: f64 },
    #[error("matrix is not positive definite (Cholesky pivot {pivot:e})")]
    NotPositiveDefinite { pivot: f64 },
    #[error("matrix is numerically singular (smallest singular value ≳ {sigma_min_estimate:e})")]
    Singular { sigma_min_estimate: f64 },
    #[error("inverse residual {residual:e} exceeds tolerance")]
    InverseResidual { residual: f64 },
    #[error("eigensolver did not converge")]
    NoConvergence,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

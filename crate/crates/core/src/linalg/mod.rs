//! Dense complex linear algebra: the handful of kernels everything else
//! builds on. Matrices are row-major and immutable in spirit; all
//! factorizations copy their input.

mod eig;
mod lu;
mod matrix;
mod mgs;
mod svd;

pub use eig::{dense_eig, dense_geig, eigenvalues_only, schur, schur_reorder, GeigResult};
pub use lu::{log_det, wrap_phase, LogDet, LuFactorization};
pub use matrix::{CMatrix, CVector};
pub use mgs::mgs_orthonormalize;
pub use svd::beyn_svd;

/// Default dimension cap for the dense eigensolvers.
pub const DENSE_EIG_CAP: usize = 4096;

/// Residual tolerance the dense eigensolvers are contracted to meet,
/// relative to the matrix norm.
pub const TOL_EIG: f64 = 1e-10;

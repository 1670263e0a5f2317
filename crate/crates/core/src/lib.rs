//! Solvers for nonlinear eigenvalue problems `T(λ)u = 0` given in split form
//!
//! ```text
//! T(z) = -B0 + z*A0 + f1(z)*A1 + ... + fp(z)*Ap
//! ```
//!
//! The scalar functions `f_j` are replaced by rational approximations with a
//! shared pole set (the quadrature nodes of a Cauchy integral on a closed
//! contour), which turns the problem into a rational eigenvalue problem that
//! linearizes implicitly into a block pencil. The pencil is never formed:
//! all solvers work through a shifted block LU built on the spectral Schur
//! complement, so a single factorization of an n-by-n matrix drives the whole
//! iteration.
//!
//! The crate ships three solvers on top of that machinery (shift-and-invert
//! Arnoldi, full subspace iteration, reduced subspace iteration with
//! restarts), a direct dense linearization for small problems, Beyn's
//! contour-integral method as an independent baseline, an analysis toolkit
//! (determinant identity, eigenvalue conditioning, halo classification) and
//! a gallery of fully specified test problems.

pub mod analysis;
pub mod baseline;
pub mod contour;
pub mod error;
pub mod gallery;
pub mod linalg;
pub mod linop;
pub mod nlevp;
pub mod solvers;

pub use contour::{Contour, QuadratureRule, RationalApprox};
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use nlevp::{build_surrogate, ScalarFn, SplitProblem, Surrogate};
pub use solvers::{EigenPair, EigenReport, Method, SolveConfig};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

//! Error type shared by every module of the crate.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A pivot fell below the singularity threshold during LU factorization.
    #[error("singular matrix: pivot {pivot:.3e} below threshold {threshold:.3e} at step {step}")]
    SingularMatrix {
        step: usize,
        pivot: f64,
        threshold: f64,
    },

    /// An eigenvalue iteration ran out of its sweep budget.
    #[error("eigenvalue iteration did not converge within {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    /// Quadrature node count below the per-shape minimum.
    #[error("invalid node count {m} for {shape} contour (need at least {min})")]
    InvalidNodeCount {
        m: usize,
        shape: &'static str,
        min: usize,
    },

    /// A scalar function returned a non-finite value.
    #[error("function term {term} evaluated to a non-finite value at z = {z}")]
    EvaluationFailure { term: usize, z: Complex64 },

    /// Evaluation point collides with a pole of the rational approximation.
    #[error("point {z} is within the pole guard of pole {pole}")]
    AtPole { z: Complex64, pole: Complex64 },

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A grid sample for the approximation-error estimate hit a pole.
    #[error("inner region is not interior to the pole contour: sample {z} coincides with a pole")]
    RegionNotInterior { z: Complex64 },

    #[error("problem dimension {dim} exceeds the dense cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    /// The operation requires the pencil mass matrix to be the identity.
    #[error("operation requires A0 = I (got a non-identity A0)")]
    NotIdentityM,

    #[error("(lambda, u, y) is not an eigentriple: residual {residual:.3e} exceeds {limit:.3e}")]
    NotEigenpair { residual: f64, limit: f64 },

    #[error("orthonormal basis degenerated: rank {rank} below required {needed}")]
    DegenerateBasis { rank: usize, needed: usize },

    /// A residual exceeded the `mu * eps` bound it is required to satisfy.
    #[error(
        "residual bound violated at lambda = {lambda}: residual {lhs:.6e} > bound {bound:.6e}"
    )]
    BoundViolated {
        lambda: Complex64,
        lhs: f64,
        bound: f64,
    },

    /// T(z) is singular at a quadrature node of the moment integral.
    #[error("T(z) is singular at quadrature node z = {z}; an eigenvalue lies on the contour")]
    SingularAtNode { z: Complex64 },

    /// Beyn's rank test could not separate signal from noise.
    #[error("probe width {ell} too small: rank test found no gap, increase the probe count")]
    RankDeficientProbe { ell: usize },

    #[error("parse error in {file} (line {line}): {message}")]
    ParseError {
        file: String,
        line: usize,
        message: String,
    },

    #[error("unknown function descriptor {descriptor:?} in term {term}")]
    UnknownFunctionDescriptor { descriptor: String, term: usize },
}

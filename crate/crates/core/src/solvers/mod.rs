//! Eigensolvers for the surrogate rational problem: shift-and-invert
//! Krylov iteration on the full linearization, full subspace iteration,
//! reduced subspace iteration with restarts, and a direct dense solve for
//! small linearizations.

mod arnoldi;
mod dense;
mod reduced;
mod subspace;

pub use arnoldi::solve_full_arnoldi;
pub use dense::solve_dense_linearization;
pub use reduced::solve_reduced_subspace;
pub use subspace::solve_full_subspace;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::contour::{Contour, RationalApprox};
use crate::error::Result;
use crate::linalg::CVector;
use crate::nlevp::{SplitProblem, Surrogate};

/// Solver selection for the dispatch entry point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FullArnoldi,
    FullSubspace,
    ReducedSubspace,
    DenseLinearization,
}

/// Common solver knobs. `sigma` defaults to the contour center, `nu` to
/// `2 k`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Shift; `None` selects the contour center.
    pub sigma: Option<(f64, f64)>,
    /// Wanted eigenvalue count.
    pub k: usize,
    /// Subspace dimension (default `2 k`).
    pub nu: Option<usize>,
    /// Inner power steps per outer sweep.
    pub q: usize,
    /// Outer iteration / restart cap.
    pub max_outer: usize,
    /// Stopping tolerance.
    pub tol: f64,
    /// PRNG seed for the random starts.
    pub seed: u64,
}

impl SolveConfig {
    pub fn new(k: usize) -> Self {
        Self {
            sigma: None,
            k,
            nu: None,
            q: 5,
            max_outer: 60,
            tol: 1e-10,
            seed: 7,
        }
    }

    pub fn with_sigma(mut self, sigma: Complex64) -> Self {
        self.sigma = Some((sigma.re, sigma.im));
        self
    }

    pub fn nu(&self) -> usize {
        self.nu.unwrap_or(2 * self.k.max(1))
    }

    pub fn sigma_for(&self, contour: &Contour) -> Complex64 {
        match self.sigma {
            Some((re, im)) => Complex64::new(re, im),
            None => contour.center(),
        }
    }
}

/// One accepted eigenpair.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub lambda: Complex64,
    /// Unit right eigenvector, phase-canonicalized (largest entry real
    /// positive).
    pub u: CVector,
    /// `||T(lambda) u||_2` against the exact problem, when available.
    pub residual_t: Option<f64>,
    /// `||Ttilde(lambda) u||_2` against the surrogate.
    pub residual_surrogate: Option<f64>,
    pub inside: bool,
    pub pole_flag: bool,
    /// Eigenvalue condition number, filled by the analysis layer.
    pub cond: Option<f64>,
}

/// Solver run description echoed into every report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportMeta {
    pub solver: String,
    pub sigma: (f64, f64),
    pub k: usize,
    pub nu: usize,
    pub q: usize,
    pub tol: f64,
    pub seed: u64,
    pub contour: Contour,
    /// Pole count of the surrogate.
    pub m: usize,
    /// Quadrature scheme the surrogate was built from, when known.
    pub quadrature: Option<String>,
    pub notes: Vec<String>,
}

/// Solver output: accepted pairs sorted by distance from the shift, plus
/// pole artifacts excluded from the accepted set.
#[derive(Clone, Debug)]
pub struct EigenReport {
    pub pairs: Vec<EigenPair>,
    /// Eigenvalue candidates discarded for sitting on a quadrature pole.
    pub pole_artifacts: Vec<Complex64>,
    /// Outer iterations (restarts for the Krylov solver).
    pub iterations: usize,
    pub meta: ReportMeta,
}

impl EigenReport {
    /// Fill `residual_t` for every pair from the exact problem.
    pub fn attach_problem_residuals(&mut self, prob: &SplitProblem) -> Result<()> {
        for pair in &mut self.pairs {
            pair.residual_t = Some(prob.residual_norm(pair.lambda, &pair.u)?);
        }
        Ok(())
    }

    /// Accepted eigenvalues strictly inside the contour.
    pub fn interior(&self) -> Vec<Complex64> {
        self.pairs
            .iter()
            .filter(|p| p.inside)
            .map(|p| p.lambda)
            .collect()
    }
}

/// Complex scalar with independent standard-normal real and imaginary
/// parts (Box-Muller).
pub fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
    Complex64::new(r * c, r * s)
}

/// Deterministic total order used everywhere a nearest-to-sigma selection
/// happens: distance, then imaginary part, then real part.
pub(crate) fn sigma_order(
    sigma: Complex64,
) -> impl Fn(&(Complex64, CVector), &(Complex64, CVector)) -> std::cmp::Ordering {
    move |a, b| {
        let da = (a.0 - sigma).norm();
        let db = (b.0 - sigma).norm();
        da.partial_cmp(&db)
            .unwrap()
            .then(a.0.im.partial_cmp(&b.0.im).unwrap())
            .then(a.0.re.partial_cmp(&b.0.re).unwrap())
    }
}

/// Assemble a report from raw eigenpair candidates: pole artifacts are
/// split off, the rest are sorted by `|lambda - sigma|` (ties by smaller
/// imaginary then real part), truncated to `keep`, flagged, and
/// canonicalized.
pub(crate) fn build_report(
    s: &Surrogate,
    contour: &Contour,
    sigma: Complex64,
    candidates: Vec<(Complex64, CVector)>,
    keep: usize,
    iterations: usize,
    meta: ReportMeta,
) -> EigenReport {
    let pole_band = 1e-8 * contour.diameter();
    let mut accepted = Vec::new();
    let mut pole_artifacts = Vec::new();
    for (lambda, u) in candidates {
        if s.m() > 0 && s.min_pole_distance(lambda) <= pole_band {
            pole_artifacts.push(lambda);
        } else {
            accepted.push((lambda, u));
        }
    }
    accepted.sort_by(sigma_order(sigma));
    accepted.truncate(keep);
    let pairs = accepted
        .into_iter()
        .map(|(lambda, u)| {
            let u = u.normalized().canonical_phase();
            let residual_surrogate = s.residual_norm(lambda, &u).ok();
            EigenPair {
                lambda,
                u,
                residual_t: None,
                residual_surrogate,
                inside: contour.is_inside(lambda),
                pole_flag: false,
                cond: None,
            }
        })
        .collect();
    EigenReport {
        pairs,
        pole_artifacts,
        iterations,
        meta,
    }
}

pub(crate) fn base_meta(
    solver: &str,
    cfg: &SolveConfig,
    contour: &Contour,
    sigma: Complex64,
    m: usize,
) -> ReportMeta {
    ReportMeta {
        solver: solver.to_string(),
        sigma: (sigma.re, sigma.im),
        k: cfg.k,
        nu: cfg.nu(),
        q: cfg.q,
        tol: cfg.tol,
        seed: cfg.seed,
        contour: contour.clone(),
        m,
        quadrature: None,
        notes: Vec::new(),
    }
}

/// Dispatch entry point used by the command-line driver: runs the selected
/// method and attaches exact-problem residuals and the quadrature scheme.
pub fn solve(
    method: Method,
    prob: &SplitProblem,
    s: &Surrogate,
    ra: &RationalApprox,
    cfg: &SolveConfig,
    contour: &Contour,
) -> Result<EigenReport> {
    let mut report = match method {
        Method::FullArnoldi => solve_full_arnoldi(s, cfg, contour)?,
        Method::FullSubspace => solve_full_subspace(s, cfg, contour)?,
        Method::ReducedSubspace => solve_reduced_subspace(prob, s, ra, cfg, contour)?,
        Method::DenseLinearization => solve_dense_linearization(s, cfg, contour)?,
    };
    report.meta.quadrature = Some(ra.scheme.clone());
    report.attach_problem_residuals(prob)?;
    Ok(report)
}

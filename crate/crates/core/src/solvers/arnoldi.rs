//! Shift-and-invert Krylov solver on the full linearization.
//!
//! The implicitly restarted iteration is realized as Krylov-Schur: restart
//! compresses onto the Schur vectors of the leading (largest-magnitude)
//! Ritz values, which keeps converged directions locked and is equivalent
//! in effect to implicit restarting while being far simpler to get right.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::contour::Contour;
use crate::error::{Error, Result};
use crate::linalg::{dense_eig, schur, schur_reorder, CMatrix, CVector};
use crate::linop::{apply_shift_invert, factor_shifted, BlockVector};
use crate::nlevp::Surrogate;

use super::{base_meta, build_report, complex_normal, EigenReport, SolveConfig};

/// A Ritz pair of the shift-inverted operator that passed the residual
/// test: `theta` (operator eigenvalue) and its unit Ritz vector.
pub(crate) struct ConvergedRitz {
    pub theta: Complex64,
    pub vector: CVector,
}

pub(crate) struct KrylovOutcome {
    pub converged: Vec<ConvergedRitz>,
    pub restarts: usize,
}

/// What the restarted iteration must deliver before it stops.
#[derive(Clone, Copy)]
pub(crate) enum StopRule {
    /// The `k` largest-magnitude Ritz values must converge; failing the
    /// restart budget is an error.
    DominantCount(usize),
    /// Every Ritz value with `|theta| >= floor` must converge; on budget
    /// exhaustion the converged subset is returned as a partial result
    /// (the caller's outer iteration decides whether that is enough).
    Magnitude { floor: f64 },
}

/// Krylov-Schur iteration for dominant eigenvalues of the linear operator
/// `apply` on `C^dim`. `want` sizes the restart compression.
pub(crate) fn krylov_schur(
    mut apply: impl FnMut(&CVector) -> CVector,
    dim: usize,
    want: usize,
    stop: StopRule,
    max_basis: usize,
    tol: f64,
    seed: u64,
    max_restarts: usize,
) -> Result<KrylovOutcome> {
    assert!(want >= 1);
    let m_max = max_basis.min(dim).max(want.min(dim));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Basis vectors (j + 1 of them for an order-j factorization) and the
    // compact matrix H, stored (m_max + 1) x m_max.
    let mut v: Vec<CVector> = Vec::with_capacity(m_max + 1);
    let mut h = CMatrix::zeros(m_max + 1, m_max);
    let start = CVector::from_fn(dim, |_| complex_normal(&mut rng)).normalized();
    v.push(start);
    let mut j = 0usize; // current factorization order
    let mut exhausted = false; // operator range fully spanned

    for restart in 0..max_restarts {
        // Expand the factorization to full order.
        while j < m_max && !exhausted {
            let mut w = apply(&v[j]);
            let w_scale = w.norm2();
            // Modified Gram-Schmidt with one re-orthogonalization pass.
            let mut coeffs = vec![Complex64::new(0.0, 0.0); j + 1];
            for _pass in 0..2 {
                for (i, vi) in v.iter().enumerate() {
                    let c = vi.dot(&w);
                    w.axpy(-c, vi);
                    coeffs[i] += c;
                }
            }
            let beta = w.norm2();
            for (i, &c) in coeffs.iter().enumerate() {
                h[(i, j)] = c;
            }
            if beta <= 1e-13 * w_scale.max(1e-300) {
                // Invariant subspace: this column is exact (zero residual).
                // Try to continue in a fresh random direction.
                h[(j + 1, j)] = Complex64::new(0.0, 0.0);
                j += 1;
                if v.len() >= dim {
                    exhausted = true;
                    continue;
                }
                let mut fresh = CVector::from_fn(dim, |_| complex_normal(&mut rng));
                for _pass in 0..2 {
                    for vi in v.iter() {
                        let c = vi.dot(&fresh);
                        fresh.axpy(-c, vi);
                    }
                }
                let fn_norm = fresh.norm2();
                if fn_norm <= 1e-10 {
                    exhausted = true;
                    continue;
                }
                v.push(fresh.scale(Complex64::new(1.0 / fn_norm, 0.0)));
            } else {
                h[(j + 1, j)] = Complex64::new(beta, 0.0);
                v.push(w.scale(Complex64::new(1.0 / beta, 0.0)));
                j += 1;
            }
        }

        // Ritz extraction from the square part.
        let hm = CMatrix::from_fn(j, j, |r, c| h[(r, c)]);
        let beta = if exhausted || j == 0 {
            0.0
        } else {
            h[(j, j - 1)].norm()
        };
        let (thetas, svecs) = dense_eig(&hm)?;
        let mut order: Vec<usize> = (0..j).collect();
        order.sort_by(|&a, &b| thetas[b].norm().partial_cmp(&thetas[a].norm()).unwrap());

        let residual_of = |idx: usize| -> f64 {
            let s = svecs.column(idx);
            beta * s[j - 1].norm() / s.norm2()
        };
        let is_converged = |idx: usize| residual_of(idx) <= tol * thetas[idx].norm().max(1e-300);
        let goal_met = match stop {
            StopRule::DominantCount(k) => order[..k.min(j)].iter().all(|&idx| is_converged(idx)),
            StopRule::Magnitude { floor } => order
                .iter()
                .filter(|&&idx| thetas[idx].norm() >= floor)
                .all(|&idx| is_converged(idx)),
        };
        let last_chance = restart + 1 == max_restarts;

        if goal_met || exhausted || last_chance {
            let mut converged = Vec::new();
            for &idx in &order {
                if is_converged(idx) {
                    let s = svecs.column(idx);
                    let mut x = CVector::zeros(dim);
                    for (i, vi) in v.iter().take(j).enumerate() {
                        x.axpy(s[i], vi);
                    }
                    converged.push(ConvergedRitz {
                        theta: thetas[idx],
                        vector: x.normalized(),
                    });
                }
            }
            let enough = match stop {
                StopRule::DominantCount(k) => converged.len() >= k.min(j),
                StopRule::Magnitude { .. } => goal_met,
            };
            if enough || exhausted {
                return Ok(KrylovOutcome {
                    converged,
                    restarts: restart,
                });
            }
            if last_chance {
                return match stop {
                    StopRule::DominantCount(_) => Err(Error::ConvergenceFailure {
                        sweeps: max_restarts,
                    }),
                    // Partial results keep the caller's outer iteration
                    // moving; it owns the real stopping criterion.
                    StopRule::Magnitude { .. } => Ok(KrylovOutcome {
                        converged,
                        restarts: max_restarts,
                    }),
                };
            }
        }

        // Krylov-Schur restart: compress onto the leading Schur vectors.
        let (mut t, mut q) = schur(&hm)?;
        schur_reorder(&mut t, &mut q, |lam| lam.norm());
        let keep =
            (want + (j.saturating_sub(want)) / 2).clamp(want.min(j), j.saturating_sub(1).max(1));
        let mut new_v: Vec<CVector> = Vec::with_capacity(keep + 1);
        for col in 0..keep {
            let mut x = CVector::zeros(dim);
            for (i, vi) in v.iter().take(j).enumerate() {
                x.axpy(q[(i, col)], vi);
            }
            new_v.push(x);
        }
        new_v.push(v[j].clone()); // residual direction
        let mut new_h = CMatrix::zeros(m_max + 1, m_max);
        for r in 0..keep {
            for c in r..keep {
                new_h[(r, c)] = t[(r, c)];
            }
        }
        for c in 0..keep {
            // Coupling row: beta * (last row of Q).
            new_h[(keep, c)] = h[(j, j - 1)] * q[(j - 1, c)];
        }
        v = new_v;
        h = new_h;
        j = keep;
    }
    Err(Error::ConvergenceFailure {
        sweeps: max_restarts,
    })
}

/// Shift-and-invert Arnoldi on the full linearization: compute the `k`
/// eigenvalues of the surrogate closest to the shift by running the
/// restarted Krylov iteration on `(A - sigma M)^{-1} M` and mapping Ritz
/// values back through `lambda = sigma + 1/theta`.
pub fn solve_full_arnoldi(
    s: &Surrogate,
    cfg: &SolveConfig,
    contour: &Contour,
) -> Result<EigenReport> {
    let sigma = cfg.sigma_for(contour);
    let fac = factor_shifted(s, sigma)?;
    let dim = s.linearization_dim();
    let max_basis = (2 * cfg.nu()).max(cfg.k + 20).min(dim);

    let apply = |x: &CVector| {
        let w = BlockVector::from_flat(s.m(), s.dim(), x);
        apply_shift_invert(&fac, s, &w).flatten()
    };
    let outcome = krylov_schur(
        apply,
        dim,
        cfg.k,
        StopRule::DominantCount(cfg.k),
        max_basis,
        cfg.tol,
        cfg.seed,
        cfg.max_outer.max(1),
    )?;

    let theta_max = outcome
        .converged
        .iter()
        .map(|r| r.theta.norm())
        .fold(0.0, f64::max);
    let mut candidates = Vec::new();
    for ritz in &outcome.converged {
        // theta ~ 0 corresponds to an infinite eigenvalue of the pencil
        // (singular mass); skip those directions.
        if ritz.theta.norm() <= 1e-12 * theta_max.max(1e-300) {
            continue;
        }
        let lambda = sigma + ritz.theta.inv();
        let w = BlockVector::from_flat(s.m(), s.dim(), &ritz.vector);
        candidates.push((lambda, w.u));
    }
    let meta = base_meta("full-arnoldi", cfg, contour, sigma, s.m());
    Ok(build_report(
        s,
        contour,
        sigma,
        candidates,
        cfg.k,
        outcome.restarts,
        meta,
    ))
}

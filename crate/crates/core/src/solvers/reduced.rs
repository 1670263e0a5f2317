//! Reduced subspace iteration with restarts: all long vectors live one at
//! a time, the projection basis holds only bottom blocks of length n, and
//! each outer sweep solves a projected rational eigenproblem of dimension
//! nu with the same pole set.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::contour::{Contour, RationalApprox};
use crate::error::{Error, Result};
use crate::linalg::{dense_eig, mgs_orthonormalize, CMatrix, CVector, LuFactorization};
use crate::linop::{apply_shift_invert, factor_shifted, lift_eigvec, materialize, BlockVector};
use crate::nlevp::{scaled_residual_sum, ResidualKind, SplitProblem, Surrogate};

use super::arnoldi::{krylov_schur, StopRule};
use super::{base_meta, build_report, EigenReport, SolveConfig};

/// Reduced linearizations up to this size are solved densely; larger ones
/// go through the same shift-and-invert Krylov iteration as the full
/// problem, which the projected problem supports unchanged (it is itself a
/// surrogate with the same poles).
const REDUCED_DENSE_CAP: usize = 500;

pub fn solve_reduced_subspace(
    prob: &SplitProblem,
    s: &Surrogate,
    ra: &RationalApprox,
    cfg: &SolveConfig,
    contour: &Contour,
) -> Result<EigenReport> {
    let sigma = cfg.sigma_for(contour);
    let fac = factor_shifted(s, sigma)?;
    let n = s.dim();
    let m = s.m();
    let nu = cfg.nu().min(n);
    if cfg.k > nu {
        return Err(Error::DimensionMismatch {
            context: "solve_reduced_subspace: k exceeds subspace dimension",
            expected: nu,
            got: cfg.k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let norms = prob.term_norms();
    let mut accepted: Vec<(Complex64, CVector)> = Vec::new();

    for outer in 1..=cfg.max_outer {
        // One long vector lives at a time: run q shift-invert steps per
        // start and keep only the bottom block.
        let mut bottoms: Vec<CVector> = Vec::with_capacity(nu);
        for j in 0..nu {
            let mut w = match accepted.get(j) {
                Some((lambda, u)) => lift_eigvec(s, *lambda, u)
                    .unwrap_or_else(|_| BlockVector::random(m, n, &mut rng)),
                None => BlockVector::random(m, n, &mut rng),
            };
            for _ in 0..cfg.q {
                w = apply_shift_invert(&fac, s, &w);
                let nw = w.norm2();
                if nw > 0.0 {
                    w = w.scale(Complex64::new(1.0 / nw, 0.0));
                }
            }
            bottoms.push(w.u);
        }
        let (q_mat, rank) = mgs_orthonormalize(&CMatrix::from_columns(&bottoms));
        if rank < cfg.k {
            return Err(Error::DegenerateBasis {
                rank,
                needed: cfg.k,
            });
        }

        // Projected surrogate: same poles, blocks compressed to rank x rank.
        let qh = q_mat.hermitian();
        let compress = |mat: &CMatrix| qh.matmul(&mat.matmul(&q_mat));
        let reduced = Surrogate::from_parts(
            compress(s.b0()),
            compress(s.a0()),
            s.poles().to_vec(),
            s.b().iter().map(compress).collect(),
        );

        // All reduced eigenpairs near the region of interest. The Krylov
        // path must converge everything clearly inside the pole ring.
        let r_hat = contour
            .sample_boundary(256)
            .iter()
            .map(|z| (z - sigma).norm())
            .fold(0.0, f64::max);
        let theta_floor = 1.0 / (0.995 * r_hat);
        let reduced_pairs = solve_reduced_linearization(&reduced, sigma, theta_floor, cfg)?;

        // Filter to the contour interior, off poles, and recover full
        // eigenvectors u = Q y. The projected problem also produces
        // spurious interior Ritz values that never converge; rank the
        // candidates by their residual against the full surrogate and
        // collapse clusters onto their cleanest representative.
        let pole_band = 1e-8 * contour.diameter();
        let mut candidates: Vec<(Complex64, CVector, f64)> = Vec::new();
        for (lambda, y) in reduced_pairs {
            if !contour.is_inside(lambda) {
                continue;
            }
            if m > 0 && s.min_pole_distance(lambda) <= pole_band {
                continue;
            }
            let u = q_mat.matvec(&y).normalized();
            let res = match s.residual_norm(lambda, &u) {
                Ok(r) => r,
                Err(_) => continue,
            };
            candidates.push((lambda, u, res));
        }
        candidates.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap());
        let cluster_radius = 1e-3 * contour.diameter();
        let mut kept: Vec<(Complex64, CVector)> = Vec::new();
        for (lambda, u, _) in candidates {
            if kept
                .iter()
                .all(|(l, _)| (l - lambda).norm() > cluster_radius)
            {
                kept.push((lambda, u));
            }
        }
        accepted = kept;

        if std::env::var_os("RATNLEVP_TRACE").is_some() {
            let sum = if accepted.len() >= cfg.k {
                let head: Vec<(Complex64, CVector)> =
                    accepted.iter().take(cfg.k).cloned().collect();
                scaled_residual_sum(prob, &norms, &head, ResidualKind::Surrogate(s, ra)).ok()
            } else {
                None
            };
            let per_pair: Vec<f64> = accepted
                .iter()
                .take(cfg.k)
                .map(|(l, u)| s.residual_norm(*l, u).unwrap_or(f64::NAN))
                .collect();
            let lo = per_pair.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = per_pair.iter().cloned().fold(0.0f64, f64::max);
            eprintln!(
                "outer {outer}: rank {rank}, accepted {}, stop sum {sum:?}, pair res [{lo:.2e}, {hi:.2e}]",
                accepted.len()
            );
        }
        // Stopping rule: scaled surrogate residual over the k pairs
        // nearest the shift.
        if accepted.len() >= cfg.k {
            let head: Vec<(Complex64, CVector)> = accepted.iter().take(cfg.k).cloned().collect();
            let sum = scaled_residual_sum(prob, &norms, &head, ResidualKind::Surrogate(s, ra))?;
            if sum <= cfg.tol {
                let meta = base_meta("reduced-subspace", cfg, contour, sigma, m);
                let mut report = build_report(s, contour, sigma, head, cfg.k, outer, meta);
                report.attach_problem_residuals(prob)?;
                return Ok(report);
            }
        }
    }
    Err(Error::ConvergenceFailure {
        sweeps: cfg.max_outer,
    })
}

/// Solve the projected linearization for eigenpairs `(lambda, y)`.
///
/// Small problems are materialized and solved through the shift-inverted
/// dense eigenproblem `(A - sigma M)^{-1} M`, which tolerates a singular
/// mass block. Large ones reuse the restarted Krylov iteration on the
/// reduced surrogate's own Schur-complement solve.
fn solve_reduced_linearization(
    reduced: &Surrogate,
    sigma: Complex64,
    theta_floor: f64,
    cfg: &SolveConfig,
) -> Result<Vec<(Complex64, CVector)>> {
    let dim = reduced.linearization_dim();
    let nu = reduced.dim();
    if dim <= REDUCED_DENSE_CAP {
        let (a, mm) = materialize(reduced);
        // The shift may collide with a reduced eigenvalue; nudge it.
        let mut shift = sigma;
        let mut lu = None;
        for attempt in 0..5 {
            let shifted = a.add_scaled(-shift, &mm);
            match LuFactorization::new(&shifted) {
                Ok(f) if f.pivot_ratio() > 1e-14 => {
                    lu = Some(f);
                    break;
                }
                _ => {
                    let bump = 1e-5 * (1.0 + sigma.norm()) * (attempt + 1) as f64;
                    shift = sigma + Complex64::new(bump, 0.37 * bump);
                }
            }
        }
        let lu = lu.ok_or(Error::SingularMatrix {
            step: 0,
            pivot: 0.0,
            threshold: 0.0,
        })?;
        let h = lu.solve_matrix(&mm);
        let (thetas, vectors) = dense_eig(&h)?;
        let theta_max = thetas.iter().map(|t| t.norm()).fold(0.0, f64::max);
        let mut out = Vec::new();
        for (idx, theta) in thetas.iter().enumerate() {
            if theta.norm() <= 1e-12 * theta_max.max(1e-300) {
                continue; // infinite eigenvalue of the pencil
            }
            let lambda = shift + theta.inv();
            let w = BlockVector::from_flat(reduced.m(), nu, &vectors.column(idx));
            let un = w.u.norm2();
            if un == 0.0 {
                continue;
            }
            out.push((lambda, w.u.scale(Complex64::new(1.0 / un, 0.0))));
        }
        Ok(out)
    } else {
        let fac = factor_shifted(reduced, sigma)?;
        let apply = |x: &CVector| {
            let w = BlockVector::from_flat(reduced.m(), nu, x);
            apply_shift_invert(&fac, reduced, &w).flatten()
        };
        let want = nu;
        let max_basis = (3 * want).max(want + 16).min(dim);
        let inner_tol = (cfg.tol * 1e-2).max(1e-13);
        let outcome = krylov_schur(
            apply,
            dim,
            want,
            StopRule::Magnitude { floor: theta_floor },
            max_basis,
            inner_tol,
            cfg.seed ^ 0x5eed_cafe,
            80,
        )?;
        let theta_max = outcome
            .converged
            .iter()
            .map(|r| r.theta.norm())
            .fold(0.0, f64::max);
        let mut out = Vec::new();
        for ritz in &outcome.converged {
            if ritz.theta.norm() <= 1e-12 * theta_max.max(1e-300) {
                continue;
            }
            let lambda = sigma + ritz.theta.inv();
            let w = BlockVector::from_flat(reduced.m(), nu, &ritz.vector);
            let un = w.u.norm2();
            if un == 0.0 {
                continue;
            }
            out.push((lambda, w.u.scale(Complex64::new(1.0 / un, 0.0))));
        }
        Ok(out)
    }
}

//! Full subspace iteration on the linearization: blocks of shift-inverted
//! power steps, orthonormalization, and a Rayleigh-Ritz projection with
//! the pencil `(W^H A W, W^H M W)`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::contour::Contour;
use crate::error::{Error, Result};
use crate::linalg::{dense_geig, mgs_orthonormalize, CMatrix, CVector};
use crate::linop::{apply_a, apply_m, apply_shift_invert, factor_shifted, BlockVector};
use crate::nlevp::Surrogate;

use super::{base_meta, build_report, complex_normal, sigma_order, EigenReport, SolveConfig};

pub fn solve_full_subspace(
    s: &Surrogate,
    cfg: &SolveConfig,
    contour: &Contour,
) -> Result<EigenReport> {
    let sigma = cfg.sigma_for(contour);
    let fac = factor_shifted(s, sigma)?;
    let dim = s.linearization_dim();
    let nu = cfg.nu().min(dim);
    if cfg.k > nu {
        return Err(Error::DimensionMismatch {
            context: "solve_full_subspace: k exceeds subspace dimension",
            expected: nu,
            got: cfg.k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut basis: Vec<CVector> = (0..nu)
        .map(|_| CVector::from_fn(dim, |_| complex_normal(&mut rng)))
        .collect();

    for outer in 1..=cfg.max_outer {
        // q inverse-power steps on each column, renormalized to keep the
        // magnitudes in range.
        for col in basis.iter_mut() {
            let mut w = BlockVector::from_flat(s.m(), s.dim(), col);
            for _ in 0..cfg.q {
                w = apply_shift_invert(&fac, s, &w);
                let nw = w.norm2();
                if nw > 0.0 {
                    w = w.scale(Complex64::new(1.0 / nw, 0.0));
                }
            }
            *col = w.flatten();
        }
        let w_mat = CMatrix::from_columns(&basis);
        let (q_mat, rank) = mgs_orthonormalize(&w_mat);
        if rank < cfg.k {
            return Err(Error::DegenerateBasis {
                rank,
                needed: cfg.k,
            });
        }

        // Rayleigh-Ritz with the pencil (Q^H A Q, Q^H M Q).
        let q_cols: Vec<CVector> = (0..rank).map(|j| q_mat.column(j)).collect();
        let mut aq = Vec::with_capacity(rank);
        let mut mq = Vec::with_capacity(rank);
        for qc in &q_cols {
            let w = BlockVector::from_flat(s.m(), s.dim(), qc);
            aq.push(apply_a(s, &w).flatten());
            mq.push(apply_m(s, &w).flatten());
        }
        let ap = CMatrix::from_fn(rank, rank, |i, j| q_cols[i].dot(&aq[j]));
        let mp = CMatrix::from_fn(rank, rank, |i, j| q_cols[i].dot(&mq[j]));
        let g = dense_geig(&ap, &mp)?;

        // Ritz vectors in the big space; the restart reuses all of them.
        // Only pairs that actually satisfy the scaled pencil residual are
        // eigenpair candidates: a projected basis always carries a few
        // non-converged directions whose Ritz values land anywhere in the
        // numerical range, and those must not displace true pairs in the
        // nearest-to-shift selection.
        let mut ritz: Vec<(Complex64, CVector)> = Vec::with_capacity(rank);
        let mut good: Vec<(Complex64, CVector, f64)> = Vec::new();
        for idx in 0..rank {
            if !g.finite[idx] {
                continue;
            }
            let y = g.vectors.column(idx);
            let mut x = CVector::zeros(dim);
            for (i, qc) in q_cols.iter().enumerate() {
                x.axpy(y[i], qc);
            }
            let x = x.normalized();
            let lambda = g.values[idx];
            let w = BlockVector::from_flat(s.m(), s.dim(), &x);
            let mut r = apply_a(s, &w);
            r.axpy(-lambda, &apply_m(s, &w));
            let res = r.norm2();
            if res <= cfg.tol * (1.0 + lambda.norm()) {
                good.push((lambda, x.clone(), res));
            }
            ritz.push((lambda, x));
        }
        // Collapse duplicate copies of the same eigenvalue onto the best.
        good.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap());
        let cluster_radius = 1e-3 * contour.diameter();
        let mut accepted: Vec<(Complex64, CVector)> = Vec::new();
        for (lambda, x, _) in good {
            if accepted
                .iter()
                .all(|(l, _)| (l - lambda).norm() > cluster_radius)
            {
                accepted.push((lambda, x));
            }
        }
        if accepted.len() >= cfg.k {
            accepted.sort_by(sigma_order(sigma));
            let candidates = accepted
                .into_iter()
                .take(cfg.k)
                .map(|(lambda, x)| {
                    let w = BlockVector::from_flat(s.m(), s.dim(), &x);
                    (lambda, w.u)
                })
                .collect();
            let meta = base_meta("full-subspace", cfg, contour, sigma, s.m());
            return Ok(build_report(
                s, contour, sigma, candidates, cfg.k, outer, meta,
            ));
        }
        basis = ritz.into_iter().map(|(_, x)| x).collect();
        while basis.len() < nu {
            basis.push(CVector::from_fn(dim, |_| complex_normal(&mut rng)));
        }
    }
    Err(Error::ConvergenceFailure {
        sweeps: cfg.max_outer,
    })
}

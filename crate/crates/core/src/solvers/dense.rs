//! Direct dense solve of the materialized linearization, adequate for
//! small problems and the halo analysis (which needs the whole spectrum).

use crate::contour::Contour;
use crate::error::{Error, Result};
use crate::linalg::{dense_eig, dense_geig, CMatrix, DENSE_EIG_CAP};
use crate::linop::{materialize, BlockVector};
use crate::nlevp::Surrogate;

use super::{base_meta, build_report, EigenReport, SolveConfig};

/// Materialize the pencil and return every finite eigenvalue with its
/// bottom-block eigenvector. When `A0 = I` exactly, the mass matrix is the
/// identity and a plain eigensolve is used.
pub fn solve_dense_linearization(
    s: &Surrogate,
    cfg: &SolveConfig,
    contour: &Contour,
) -> Result<EigenReport> {
    let dim = s.linearization_dim();
    if dim > DENSE_EIG_CAP {
        return Err(Error::DimensionCap {
            dim,
            cap: DENSE_EIG_CAP,
        });
    }
    let sigma = cfg.sigma_for(contour);
    let (a, m) = materialize(s);
    let identity_mass = s.a0().sub(&CMatrix::identity(s.dim())).max_norm() == 0.0;
    let (values, finite, vectors) = if identity_mass {
        let (values, vectors) = dense_eig(&a)?;
        let finite = vec![true; values.len()];
        (values, finite, vectors)
    } else {
        let g = dense_geig(&a, &m)?;
        (g.values, g.finite, g.vectors)
    };
    let mut candidates = Vec::with_capacity(dim);
    for (idx, lambda) in values.iter().enumerate() {
        if !finite[idx] {
            continue;
        }
        let w = BlockVector::from_flat(s.m(), s.dim(), &vectors.column(idx));
        candidates.push((*lambda, w.u));
    }
    let keep = candidates.len();
    let meta = base_meta("dense-linearization", cfg, contour, sigma, s.m());
    Ok(build_report(s, contour, sigma, candidates, keep, 1, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVector;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn oversized_linearization_is_capped() {
        let n = 100;
        let m = 50; // (m + 1) n = 5100 > cap
        let poles = (0..m).map(|i| c(i as f64 + 10.0, 1.0)).collect();
        let b = (0..m).map(|_| CMatrix::zeros(n, n)).collect();
        let s = Surrogate::from_parts(CMatrix::identity(n), CMatrix::identity(n), poles, b);
        let contour = Contour::circle(c(0.0, 0.0), 1.0);
        assert!(matches!(
            solve_dense_linearization(&s, &SolveConfig::new(2), &contour),
            Err(Error::DimensionCap { .. })
        ));
    }

    #[test]
    fn plain_pencil_with_no_poles() {
        let b0 = CMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, -3.0]]);
        let s = Surrogate::from_parts(b0, CMatrix::identity(2), vec![], vec![]);
        let contour = Contour::circle(c(0.0, 0.0), 4.0);
        let cfg = SolveConfig::new(2);
        let report = solve_dense_linearization(&s, &cfg, &contour).unwrap();
        assert_eq!(report.pairs.len(), 2);
        let mut vals: Vec<f64> = report.pairs.iter().map(|p| p.lambda.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((vals[0] + 3.0).abs() < 1e-10 && (vals[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn eigenvectors_solve_the_surrogate() {
        // Small surrogate with one pole: check Ttilde(lambda) u ~ 0.
        let b0 = CMatrix::from_real_rows(&[&[1.0, 0.5], &[0.0, 2.0]]);
        let b1 = CMatrix::from_real_rows(&[&[0.3, 0.0], &[0.1, 0.2]]);
        let s = Surrogate::from_parts(b0, CMatrix::identity(2), vec![c(3.0, 1.0)], vec![b1]);
        let contour = Contour::circle(c(0.0, 0.0), 10.0);
        let cfg = SolveConfig::new(4);
        let report = solve_dense_linearization(&s, &cfg, &contour).unwrap();
        assert_eq!(report.pairs.len(), 4);
        for p in &report.pairs {
            let r = p.residual_surrogate.unwrap();
            assert!(r < 1e-9, "residual {r:.2e} at {}", p.lambda);
            let ru: f64 = s.evaluate(p.lambda).unwrap().matvec(&p.u).norm2();
            assert!((ru - r).abs() < 1e-12 * r.max(1.0));
            assert!((p.u.norm2() - 1.0).abs() < 1e-12);
            let _ = CVector::zeros(1);
        }
    }
}

//! Theory-validation toolkit: the determinant identity of the
//! linearization, residual bounds, eigenvalue condition numbers, and the
//! classification of extraneous "halo" eigenvalues.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::contour::{approx_error, Contour, RationalApprox};
use crate::error::{Error, Result};
use crate::linalg::{
    dense_geig, log_det, CMatrix, CVector, LogDet, LuFactorization, DENSE_EIG_CAP,
};
use crate::linop::{materialize, schur_matrix};
use crate::nlevp::{ScalarFn, SplitProblem, Surrogate};
use crate::solvers::{complex_normal, EigenReport};

/// Both sides of the determinant identity
/// `det(A - z I) = det(S(z)) prod_j (sigma_j - z)^n`
/// (or `det(B_i) prod_{j != i} (sigma_j - sigma_i)^n` at a pole), in
/// log-magnitude/phase form.
#[derive(Clone, Copy, Debug)]
pub struct DetIdentity {
    pub lhs: LogDet,
    pub rhs: LogDet,
    /// Max of the normalized log-magnitude gap and the phase gap.
    pub rel_err: f64,
}

/// Evaluate both sides of the determinant identity at `z`. Requires
/// `A0 = I` (the identity's standing assumption) and a materializable
/// linearization.
pub fn det_identity_check(s: &Surrogate, z: Complex64) -> Result<DetIdentity> {
    if s.a0().sub(&CMatrix::identity(s.dim())).max_norm() != 0.0 {
        return Err(Error::NotIdentityM);
    }
    let dim = s.linearization_dim();
    if dim > DENSE_EIG_CAP {
        return Err(Error::DimensionCap {
            dim,
            cap: DENSE_EIG_CAP,
        });
    }
    let n = s.dim() as i32;
    let (a, _) = materialize(s);
    let shifted = a.add_scaled(-z, &CMatrix::identity(dim));
    let lhs = log_det(&shifted);

    let guard = s.pole_guard();
    let at_pole = s.poles().iter().position(|p| (z - p).norm() <= guard);
    let rhs = match at_pole {
        Some(i) => {
            // det(B_i) * prod_{j != i} (sigma_j - sigma_i)^n
            let mut acc = log_det(&s.b()[i]);
            let sigma_i = s.poles()[i];
            for (j, sigma_j) in s.poles().iter().enumerate() {
                if j != i {
                    acc = acc.product(LogDet::from_complex(sigma_j - sigma_i).powi(n));
                }
            }
            acc
        }
        None => {
            let sm = schur_matrix(s, z)?;
            let mut acc = log_det(&sm);
            for sigma_j in s.poles() {
                acc = acc.product(LogDet::from_complex(sigma_j - z).powi(n));
            }
            acc
        }
    };
    let rel_err = logdet_distance(lhs, rhs);
    Ok(DetIdentity { lhs, rhs, rel_err })
}

fn logdet_distance(a: LogDet, b: LogDet) -> f64 {
    if a.log_mag == f64::NEG_INFINITY && b.log_mag == f64::NEG_INFINITY {
        return 0.0;
    }
    let mag_scale = a.log_mag.abs().max(b.log_mag.abs()).max(1.0);
    let dmag = (a.log_mag - b.log_mag).abs() / mag_scale;
    let wrapped = crate::linalg::wrap_phase(a.phase - b.phase).abs() / std::f64::consts::PI;
    dmag.max(wrapped)
}

/// Eigenvalue condition number of the linearization per the
/// Schur-complement formula.
///
/// `kappa = alpha_u * alpha_y / |(S'(lambda) u, y)|` with
/// `alpha_u = sqrt(1 + sum 1/|lambda - sigma_i|^2)` and the squared-norm
/// form `alpha_y = sqrt(1 + sum ||B_i y||^2 / |lambda - sigma_i|^2)`.
/// `alpha_y_printed` carries the unsquared variant that some write-ups
/// display; the squared form is the one consistent with the `||s||^2`
/// derivation and is used for `kappa`.
#[derive(Clone, Debug)]
pub struct ConditionEstimate {
    pub lambda: Complex64,
    pub kappa: f64,
    pub alpha_u: f64,
    pub alpha_y: f64,
    pub alpha_y_printed: f64,
    /// `|(S'(lambda) u, y)|`.
    pub denom: f64,
}

/// Condition number of a simple eigenvalue `lambda` of the linearization,
/// from unit right/left eigenvectors `u`, `y` of `S(lambda)`.
pub fn condition_number(
    s: &Surrogate,
    lambda: Complex64,
    u: &CVector,
    y: &CVector,
) -> Result<ConditionEstimate> {
    if s.a0().sub(&CMatrix::identity(s.dim())).max_norm() != 0.0 {
        return Err(Error::NotIdentityM);
    }
    if s.m() > 0 && s.min_pole_distance(lambda) <= s.pole_guard() {
        let pole = s.poles()[0];
        return Err(Error::AtPole { z: lambda, pole });
    }
    let u = u.normalized();
    let y = y.normalized();
    let sm = schur_matrix(s, lambda)?;
    let scale = sm.fro_norm().max(1.0);
    let res_right = sm.matvec(&u).norm2();
    let res_left = sm.hermitian().matvec(&y).norm2();
    let limit = 1e-6 * scale;
    if res_right > limit || res_left > limit {
        return Err(Error::NotEigenpair {
            residual: res_right.max(res_left),
            limit,
        });
    }

    let mut alpha_u_sq = 1.0;
    let mut alpha_y_sq = 1.0;
    let mut alpha_y_printed_sq = 1.0;
    for (sigma, bi) in s.poles().iter().zip(s.b()) {
        let gap_sq = (lambda - sigma).norm_sqr();
        alpha_u_sq += 1.0 / gap_sq;
        let biy = bi.matvec(&y).norm2();
        alpha_y_sq += biy * biy / gap_sq;
        alpha_y_printed_sq += biy / gap_sq;
    }
    // S'(lambda) = -I + sum B_i / (lambda - sigma_i)^2.
    let mut sprime_u = u.scale(Complex64::new(-1.0, 0.0));
    for (sigma, bi) in s.poles().iter().zip(s.b()) {
        let w = (lambda - sigma).powi(2).inv();
        sprime_u.axpy(w, &bi.matvec(&u));
    }
    let denom = y.dot(&sprime_u).norm();
    let alpha_u = alpha_u_sq.sqrt();
    let alpha_y = alpha_y_sq.sqrt();
    Ok(ConditionEstimate {
        lambda,
        kappa: alpha_u * alpha_y / denom,
        alpha_u,
        alpha_y,
        alpha_y_printed: alpha_y_printed_sq.sqrt(),
        denom,
    })
}

/// Unit left eigenvector of `S(lambda)` by two steps of inverse iteration
/// on `S(lambda)^H`, with a tiny diagonal regularization when the exactly
/// singular factorization is refused.
pub fn left_eigvec(s: &Surrogate, lambda: Complex64) -> Result<CVector> {
    let sm = schur_matrix(s, lambda)?;
    let n = sm.rows();
    let lu = match LuFactorization::new(&sm) {
        Ok(f) => f,
        Err(_) => {
            let reg = 1e-14 * sm.fro_norm().max(1.0);
            let mut smr = sm.clone();
            for i in 0..n {
                smr[(i, i)] += Complex64::new(reg, 0.0);
            }
            LuFactorization::new(&smr)?
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x1ef7);
    let mut y = CVector::from_fn(n, |_| complex_normal(&mut rng)).normalized();
    for _ in 0..2 {
        // Inverse iteration on S^H via the adjoint solve of the S factors.
        y = lu.solve_adjoint(&y).normalized();
    }
    Ok(y)
}

/// Labels for surrogate eigenvalues per the halo taxonomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HaloLabel {
    /// Inside the contour, away from it, matching (or presumed to be) a
    /// true eigenvalue.
    InteriorTrue,
    /// Matches an eigenvalue of the linear pencil `(B0, A0)` outside the
    /// contour.
    ExteriorLinearPencil,
    /// Congregates near the contour curve.
    Halo,
    /// Sits on a quadrature pole.
    PoleArtifact,
}

#[derive(Clone, Debug)]
pub struct HaloClassification {
    pub lambda: Complex64,
    pub label: HaloLabel,
    /// Set when the eigenvalue fit none of the positive rules and was
    /// binned as halo by exclusion.
    pub low_confidence: bool,
}

/// Fraction of the region diameter that counts as "near the contour".
pub const HALO_BAND: f64 = 0.05;

/// Classify every accepted eigenvalue of a report.
///
/// `reference` carries true eigenvalues of the underlying nonlinear
/// problem when an oracle is available (dense linearization for
/// polynomial problems, the contour-integral baseline otherwise); the
/// classifier never invents references.
pub fn classify_halo(
    report: &EigenReport,
    s: &Surrogate,
    contour: &Contour,
    tol_match: f64,
    reference: Option<&[Complex64]>,
) -> Vec<HaloClassification> {
    let diameter = contour.diameter();
    let pole_band = 1e-8 * diameter;
    let band = HALO_BAND * diameter;
    // Finite spectrum of the linear part (B0, A0), for the exterior rule.
    let pencil: Vec<Complex64> = match dense_geig(s.b0(), s.a0()) {
        Ok(g) => g
            .values
            .iter()
            .zip(&g.finite)
            .filter(|(_, f)| **f)
            .map(|(v, _)| *v)
            .collect(),
        Err(_) => Vec::new(),
    };

    report
        .pairs
        .iter()
        .map(|p| {
            let lambda = p.lambda;
            let dist = contour.distance_to_boundary(lambda);
            let (label, low_confidence) = if s.m() > 0 && s.min_pole_distance(lambda) <= pole_band {
                (HaloLabel::PoleArtifact, false)
            } else if contour.is_inside(lambda) && dist > band {
                // Deep interior: a true eigenvalue (matched when a
                // reference is available, still interior-true otherwise).
                let _matched = reference
                    .map(|r| r.iter().any(|t| (t - lambda).norm() <= tol_match))
                    .unwrap_or(true);
                (HaloLabel::InteriorTrue, false)
            } else if pencil
                .iter()
                .any(|t| !contour.is_inside(*t) && (t - lambda).norm() <= tol_match)
            {
                (HaloLabel::ExteriorLinearPencil, false)
            } else if dist <= band {
                (HaloLabel::Halo, false)
            } else {
                (HaloLabel::Halo, true)
            };
            HaloClassification {
                lambda,
                label,
                low_confidence,
            }
        })
        .collect()
}

/// One row of the residual-bound verification.
#[derive(Clone, Debug)]
pub struct BoundCheck {
    pub lambda: Complex64,
    /// `||T(lambda) u||_2`.
    pub lhs: f64,
    /// `mu * eps` with `mu = sum_j ||A_j||_2` and `eps` the measured
    /// approximation error over the inner region.
    pub bound: f64,
}

/// Verify the residual bound `||T(lambda) u|| <= mu * eps` for surrogate
/// eigenpairs inside the inner region.
///
/// `eps` is the largest measured approximation error over the terms and
/// `mu` the sum of spectral norms. Returns `BoundViolated` naming the
/// offending pair if the inequality fails beyond slack.
pub fn residual_bound_check(
    prob: &SplitProblem,
    ra: &RationalApprox,
    pairs: &[(Complex64, CVector)],
    inner: &Contour,
    grid_density: usize,
) -> Result<Vec<BoundCheck>> {
    let mut eps = 0.0f64;
    for (j, (_, fj)) in prob.terms().iter().enumerate() {
        let fj = fj.clone();
        let f = move |z: Complex64| fj.eval(z);
        eps = eps.max(approx_error(ra, j, &f, inner, grid_density)?);
    }
    let mu: f64 = prob.terms().iter().map(|(aj, _)| aj.spectral_norm()).sum();
    let bound = mu * eps;
    let mut out = Vec::with_capacity(pairs.len());
    for (lambda, u) in pairs {
        let lhs = prob.residual_norm(*lambda, u)?;
        if lhs > bound * (1.0 + 1e-6) {
            return Err(Error::BoundViolated {
                lambda: *lambda,
                lhs,
                bound,
            });
        }
        out.push(BoundCheck {
            lambda: *lambda,
            lhs,
            bound,
        });
    }
    Ok(out)
}

/// Reference spectrum for halo classification: the companion-pencil
/// spectrum when every term is polynomial,`None` otherwise (callers fall
/// back to the contour-integral baseline).
pub fn polynomial_oracle(prob: &SplitProblem) -> Option<Vec<Complex64>> {
    let n = prob.dim();
    let mut degree = 1usize;
    for (_, f) in prob.terms() {
        match f {
            ScalarFn::Poly(d) => degree = degree.max(*d as usize),
            _ => return None,
        }
    }
    // Coefficient matrices of P(z) = sum_d z^d C_d.
    let mut coeff = vec![CMatrix::zeros(n, n); degree + 1];
    coeff[0] = prob.b0().scale(Complex64::new(-1.0, 0.0));
    coeff[1] = prob.a0().clone();
    for (aj, f) in prob.terms() {
        if let ScalarFn::Poly(d) = f {
            coeff[*d as usize].axpy(Complex64::new(1.0, 0.0), aj);
        }
    }
    // Companion pencil: A v = z M v with v = [u; z u; ...; z^{d-1} u].
    let dim = degree * n;
    let mut a = CMatrix::zeros(dim, dim);
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..(degree - 1) * n {
        a[(i, n + i)] = Complex64::new(1.0, 0.0);
        m[(i, i)] = Complex64::new(1.0, 0.0);
    }
    for j in 0..degree {
        for r in 0..n {
            for c in 0..n {
                a[((degree - 1) * n + r, j * n + c)] = -coeff[j][(r, c)];
            }
        }
    }
    for r in 0..n {
        for c in 0..n {
            m[((degree - 1) * n + r, (degree - 1) * n + c)] = coeff[degree][(r, c)];
        }
    }
    let g = dense_geig(&a, &m).ok()?;
    Some(
        g.values
            .iter()
            .zip(&g.finite)
            .filter(|(_, f)| **f)
            .map(|(v, _)| *v)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{build_rational_approx, quadrature_rule};
    use crate::gallery;
    use crate::nlevp::build_surrogate;
    use crate::solvers::{solve_dense_linearization, solve_full_arnoldi, SolveConfig};
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn det_identity_scalar_case_hand_expansion() {
        // n = 1, m = 1: both sides equal (b - z + c1/(s - z)) (s - z).
        let (b, c1, spole) = (c(0.7, 0.1), c(-0.4, 0.3), c(2.0, -1.0));
        let s = Surrogate::from_parts(
            CMatrix::from_fn(1, 1, |_, _| b),
            CMatrix::identity(1),
            vec![spole],
            vec![CMatrix::from_fn(1, 1, |_, _| c1)],
        );
        let z = c(0.3, 0.45);
        let check = det_identity_check(&s, z).unwrap();
        let expect = (b - z + c1 / (spole - z)) * (spole - z);
        assert!((check.lhs.to_complex() - expect).norm() < 1e-12 * expect.norm());
        assert!(check.rel_err < 1e-12);
    }

    #[test]
    fn det_identity_pole_branch() {
        let (b, c1, spole) = (c(0.7, 0.1), c(-0.4, 0.3), c(2.0, -1.0));
        let s2 = c(-1.0, 0.5);
        let surr = Surrogate::from_parts(
            CMatrix::from_fn(1, 1, |_, _| b),
            CMatrix::identity(1),
            vec![spole, s2],
            vec![
                CMatrix::from_fn(1, 1, |_, _| c1),
                CMatrix::from_fn(1, 1, |_, _| c(0.2, 0.0)),
            ],
        );
        // At z = sigma_1 the identity reads det(B_1) * (sigma_2 - sigma_1)^n.
        let check = det_identity_check(&surr, spole).unwrap();
        let expect = c1 * (s2 - spole);
        assert!((check.rhs.to_complex() - expect).norm() < 1e-12 * expect.norm());
        assert!(check.rel_err < 1e-9, "rel_err = {}", check.rel_err);
    }

    #[test]
    fn det_identity_random_surrogates() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..20 {
            let n = 1 + trial % 2;
            let m = 1 + trial % 4;
            let b: Vec<CMatrix> = (0..m)
                .map(|_| {
                    CMatrix::from_fn(n, n, |_, _| {
                        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                    })
                })
                .collect();
            let poles: Vec<Complex64> = (0..m)
                .map(|i| {
                    let t = 2.0 * std::f64::consts::PI * (i as f64 + 0.3) / m as f64;
                    c(1.5 * t.cos(), 1.5 * t.sin())
                })
                .collect();
            let s = Surrogate::from_parts(
                CMatrix::from_fn(n, n, |_, _| {
                    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                }),
                CMatrix::identity(n),
                poles.clone(),
                b,
            );
            for _ in 0..10 {
                let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                if s.min_pole_distance(z) < 1e-3 {
                    continue;
                }
                let check = det_identity_check(&s, z).unwrap();
                assert!(
                    check.rel_err <= 1e-9,
                    "trial {trial}: {:.2e}",
                    check.rel_err
                );
            }
            for p in &poles {
                let check = det_identity_check(&s, *p).unwrap();
                assert!(check.rel_err <= 1e-9, "pole branch: {:.2e}", check.rel_err);
            }
        }
    }

    #[test]
    fn det_identity_requires_identity_mass() {
        let s = Surrogate::from_parts(
            CMatrix::identity(2),
            CMatrix::identity(2).scale(c(2.0, 0.0)),
            vec![c(1.0, 0.0)],
            vec![CMatrix::identity(2)],
        );
        assert!(matches!(
            det_identity_check(&s, c(0.0, 0.0)),
            Err(Error::NotIdentityM)
        ));
    }

    #[test]
    fn condition_number_of_normal_linear_problem_is_one() {
        // m = 0, B0 Hermitian with simple eigenvalue: kappa = 1.
        let b0 = CMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 5.0]]);
        let s = Surrogate::from_parts(b0, CMatrix::identity(2), vec![], vec![]);
        let u = CVector::unit(2, 0);
        let est = condition_number(&s, c(2.0, 0.0), &u, &u).unwrap();
        assert!((est.kappa - 1.0).abs() < 1e-12);
        assert!((est.alpha_u - 1.0).abs() < 1e-14);
        assert!((est.alpha_y - 1.0).abs() < 1e-14);
    }

    #[test]
    fn condition_number_scalar_case_matches_formulas() {
        // n = 1, m = 1: S(z) = b - z + c1/(s - z); eigenvalues are the
        // roots of (b - z)(s - z) + c1.
        let (b, c1, sp): (f64, f64, f64) = (1.0, 0.21, 3.0);
        // z^2 - (b+s) z + bs + c1 = 0.
        let disc = ((b + sp) * (b + sp) / 4.0 - b * sp - c1).sqrt();
        let lambda = c((b + sp) / 2.0 - disc, 0.0);
        let s = Surrogate::from_parts(
            CMatrix::from_fn(1, 1, |_, _| c(b, 0.0)),
            CMatrix::identity(1),
            vec![c(sp, 0.0)],
            vec![CMatrix::from_fn(1, 1, |_, _| c(c1, 0.0))],
        );
        let one = CVector::unit(1, 0);
        let est = condition_number(&s, lambda, &one, &one).unwrap();
        let gap = (lambda - c(sp, 0.0)).norm();
        let alpha_u = (1.0 + 1.0 / (gap * gap)).sqrt();
        let alpha_y = (1.0 + c1 * c1 / (gap * gap)).sqrt();
        let denom = (-1.0 + c1 / ((lambda.re - sp) * (lambda.re - sp))).abs();
        assert!((est.alpha_u - alpha_u).abs() < 1e-12);
        assert!((est.alpha_y - alpha_y).abs() < 1e-12);
        assert!((est.kappa - alpha_u * alpha_y / denom).abs() < 1e-10);
        // Phase invariance: rotating u and y leaves kappa unchanged.
        let phase = c(0.6, 0.8);
        let est2 = condition_number(&s, lambda, &one.scale(phase), &one.scale(phase)).unwrap();
        assert!((est2.kappa - est.kappa).abs() < 1e-10 * est.kappa);
    }

    #[test]
    fn condition_number_rejects_non_eigenpairs() {
        let b0 = CMatrix::from_real_rows(&[&[2.0, 0.0], &[0.0, 5.0]]);
        let s = Surrogate::from_parts(b0, CMatrix::identity(2), vec![], vec![]);
        let u = CVector::unit(2, 0);
        assert!(matches!(
            condition_number(&s, c(3.3, 0.0), &u, &u),
            Err(Error::NotEigenpair { .. })
        ));
    }

    #[test]
    fn left_eigvec_properties() {
        // Hermitian S: left and right eigenvectors coincide up to phase.
        let b0 = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let s = Surrogate::from_parts(b0.clone(), CMatrix::identity(2), vec![], vec![]);
        let (vals, vecs) = crate::linalg::dense_eig(&b0).unwrap();
        let y = left_eigvec(&s, vals[0]).unwrap();
        let u = vecs.column(0);
        assert!(y.dot(&u).norm() > 1.0 - 1e-8);
        // Scalar case: y = 1 up to phase.
        let s1 = Surrogate::from_parts(
            CMatrix::from_fn(1, 1, |_, _| c(0.5, 0.0)),
            CMatrix::identity(1),
            vec![],
            vec![],
        );
        let y1 = left_eigvec(&s1, c(0.5, 0.0)).unwrap();
        assert!((y1[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn left_eigvec_residual_on_delay_eigenvalues() {
        let prob = gallery::make_delay(1.0);
        let contour = Contour::circle(c(-1.0, 0.0), 6.0);
        let rule = quadrature_rule(&contour, 50).unwrap();
        let f = |z: Complex64| (-z).exp();
        let ra = build_rational_approx(&rule, &[&f]).unwrap();
        let s = build_surrogate(&prob, &ra).unwrap();
        let rep = solve_full_arnoldi(&s, &SolveConfig::new(3), &contour).unwrap();
        for p in rep.pairs.iter().take(3) {
            let y = left_eigvec(&s, p.lambda).unwrap();
            let res = schur_matrix(&s, p.lambda)
                .unwrap()
                .hermitian()
                .matvec(&y)
                .norm2();
            let scale = schur_matrix(&s, p.lambda).unwrap().fro_norm();
            assert!(
                res <= 1e-8 * scale,
                "left residual {res:.2e} at {}",
                p.lambda
            );
        }
    }

    #[test]
    fn classification_is_total_and_linear_problems_have_no_halo() {
        let b0 = CMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 2.5]]);
        let s = Surrogate::from_parts(b0, CMatrix::identity(2), vec![], vec![]);
        let contour = Contour::circle(c(0.0, 0.0), 1.6);
        let cfg = SolveConfig::new(2);
        let rep = solve_dense_linearization(&s, &cfg, &contour).unwrap();
        let labels = classify_halo(&rep, &s, &contour, 1e-6, None);
        assert_eq!(labels.len(), rep.pairs.len());
        assert!(labels.iter().all(|l| l.label != HaloLabel::Halo));
        // 0.5 is interior-true; 2.5 matches the exterior pencil.
        for l in &labels {
            if (l.lambda - c(0.5, 0.0)).norm() < 1e-9 {
                assert_eq!(l.label, HaloLabel::InteriorTrue);
            } else {
                assert_eq!(l.label, HaloLabel::ExteriorLinearPencil);
            }
        }
    }

    #[test]
    fn residual_bound_zero_case_accepts_exact_pairs() {
        // Linear problem: mu = 0 and eps = 0; exact pairs give 0 <= 0.
        let b0 = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let prob = SplitProblem::new("pencil", b0, CMatrix::identity(2), vec![]);
        let ra = RationalApprox {
            poles: vec![],
            coeffs: vec![],
            scheme: "none".into(),
        };
        let inner = Contour::circle(c(0.0, 0.0), 1.5);
        let pairs = vec![(c(1.0, 0.0), CVector::unit(2, 0))];
        let rows = residual_bound_check(&prob, &ra, &pairs, &inner, 40).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].lhs <= 1e-14);
    }

    #[test]
    fn polynomial_oracle_matches_quadratic_roots() {
        // Scalar quadratic: -2 + z + 0.5 z^2 has roots 1.236., -3.236.
        let prob = SplitProblem::new(
            "quad",
            CMatrix::identity(1).scale(c(2.0, 0.0)),
            CMatrix::identity(1),
            vec![(CMatrix::identity(1).scale(c(0.5, 0.0)), ScalarFn::Poly(2))],
        );
        let mut roots = polynomial_oracle(&prob).unwrap();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        let r1 = -1.0 + 5.0f64.sqrt(); // 1.2360
        let r2 = -1.0 - 5.0f64.sqrt();
        assert!((roots[0] - c(r2, 0.0)).norm() < 1e-10);
        assert!((roots[1] - c(r1, 0.0)).norm() < 1e-10);
    }
}

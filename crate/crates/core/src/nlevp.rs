//! Problem model in split form, surrogate construction, and residual
//! evaluation against both the exact and the surrogate operator.
//!
//! A split problem is
//!
//! ```text
//! T(z) = -B0 + z*A0 + f1(z)*A1 + ... + fp(z)*Ap ,
//! ```
//!
//! the constant and linear terms hardwired. Replacing each `f_j` by the
//! shared-pole rational approximation `r_j(z) = sum_i alpha_ij/(z - sigma_i)`
//! gives the surrogate
//!
//! ```text
//! Ttilde(z) = -B0 + z*A0 + sum_i B_i / (z - sigma_i),
//! B_i = sum_j alpha_ij A_j .
//! ```

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::contour::RationalApprox;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, LuFactorization};

/// Scalar function evaluator for a split-form term.
///
/// The first three variants form the fixed vocabulary of the problem file
/// format; `Custom` covers built-in problems whose functions fall outside
/// it (such functions serialize as `user-unsupported`).
#[derive(Clone)]
pub enum ScalarFn {
    /// `z^degree`
    Poly(u32),
    /// `exp(scale * z)`
    Exp(f64),
    /// `1 / (shift - z)`
    Recip(Complex64),
    /// Arbitrary evaluator with a display label.
    Custom(Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>, String),
}

impl ScalarFn {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            ScalarFn::Poly(d) => z.powu(*d),
            ScalarFn::Exp(a) => (z * *a).exp(),
            ScalarFn::Recip(shift) => (shift - z).inv(),
            ScalarFn::Custom(f, _) => f(z),
        }
    }

    /// Descriptor in the file-format vocabulary.
    pub fn descriptor(&self) -> String {
        match self {
            ScalarFn::Poly(d) => format!("poly({d})"),
            ScalarFn::Exp(a) => format!("exp({a})"),
            ScalarFn::Recip(s) => {
                if s.im == 0.0 {
                    format!("recip({})", s.re)
                } else {
                    format!("recip({},{})", s.re, s.im)
                }
            }
            ScalarFn::Custom(..) => "user-unsupported".to_string(),
        }
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::Custom(_, label) => write!(f, "ScalarFn::Custom({label})"),
            other => write!(f, "ScalarFn::{}", other.descriptor()),
        }
    }
}

/// Nonlinear eigenvalue problem in split form.
#[derive(Clone, Debug)]
pub struct SplitProblem {
    name: String,
    b0: CMatrix,
    a0: CMatrix,
    terms: Vec<(CMatrix, ScalarFn)>,
    has_invertible_a0: bool,
}

impl SplitProblem {
    pub fn new(
        name: impl Into<String>,
        b0: CMatrix,
        a0: CMatrix,
        terms: Vec<(CMatrix, ScalarFn)>,
    ) -> Self {
        let n = b0.rows();
        assert!(b0.is_square() && a0.is_square() && a0.rows() == n);
        for (a, _) in &terms {
            assert!(
                a.is_square() && a.rows() == n,
                "all term matrices must be n x n"
            );
        }
        let has_invertible_a0 = LuFactorization::new(&a0)
            .map(|f| f.pivot_ratio() > 1e-14)
            .unwrap_or(false);
        Self {
            name: name.into(),
            b0,
            a0,
            terms,
            has_invertible_a0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.b0.rows()
    }

    pub fn p(&self) -> usize {
        self.terms.len()
    }

    pub fn b0(&self) -> &CMatrix {
        &self.b0
    }

    pub fn a0(&self) -> &CMatrix {
        &self.a0
    }

    pub fn terms(&self) -> &[(CMatrix, ScalarFn)] {
        &self.terms
    }

    /// Whether the `A0` block (the mass of the linearization) is safely
    /// invertible. Methods that invert the mass matrix must not be used
    /// when this is false; the shift-and-invert solvers do not care.
    pub fn has_invertible_a0(&self) -> bool {
        self.has_invertible_a0
    }

    /// Evaluate `T(z) = -B0 + z A0 + sum_j f_j(z) A_j`.
    pub fn evaluate_t(&self, z: Complex64) -> Result<CMatrix> {
        let mut t = self.b0.scale(Complex64::new(-1.0, 0.0));
        t.axpy(z, &self.a0);
        for (j, (aj, fj)) in self.terms.iter().enumerate() {
            let v = fj.eval(z);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::EvaluationFailure { term: j, z });
            }
            t.axpy(v, aj);
        }
        Ok(t)
    }

    /// `||T(lambda) u||_2` with `u` normalized to unit 2-norm first.
    pub fn residual_norm(&self, lambda: Complex64, u: &CVector) -> Result<f64> {
        let t = self.evaluate_t(lambda)?;
        Ok(t.matvec(&u.normalized()).norm2())
    }

    /// Spectral norms entering the scaled-residual denominator; computed
    /// once and reused across stopping tests.
    pub fn term_norms(&self) -> ProblemNorms {
        ProblemNorms {
            b0: self.b0.spectral_norm(),
            a0: self.a0.spectral_norm(),
            terms: self.terms.iter().map(|(a, _)| a.spectral_norm()).collect(),
        }
    }
}

/// Cached spectral norms of the split-form matrices.
#[derive(Clone, Debug)]
pub struct ProblemNorms {
    pub b0: f64,
    pub a0: f64,
    pub terms: Vec<f64>,
}

/// The rational eigenproblem obtained by replacing every `f_j` with its
/// shared-pole rational approximation.
#[derive(Clone, Debug)]
pub struct Surrogate {
    n: usize,
    b0: CMatrix,
    a0: CMatrix,
    poles: Vec<Complex64>,
    b: Vec<CMatrix>,
}

impl Surrogate {
    /// Assemble a surrogate directly from its blocks (mostly for tests and
    /// for projected problems).
    pub fn from_parts(b0: CMatrix, a0: CMatrix, poles: Vec<Complex64>, b: Vec<CMatrix>) -> Self {
        let n = b0.rows();
        assert!(b0.is_square() && a0.is_square() && a0.rows() == n);
        assert_eq!(poles.len(), b.len());
        for bi in &b {
            assert!(bi.is_square() && bi.rows() == n);
        }
        Self {
            n,
            b0,
            a0,
            poles,
            b,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.poles.len()
    }

    /// Dimension of the implicit linearization, `(m + 1) n`.
    pub fn linearization_dim(&self) -> usize {
        (self.m() + 1) * self.n
    }

    pub fn b0(&self) -> &CMatrix {
        &self.b0
    }

    pub fn a0(&self) -> &CMatrix {
        &self.a0
    }

    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    pub fn b(&self) -> &[CMatrix] {
        &self.b
    }

    /// Guard distance below which a point counts as sitting on a pole.
    pub fn pole_guard(&self) -> f64 {
        let scale = self.poles.iter().map(|p| p.norm()).fold(1.0f64, f64::max);
        1e-12 * scale
    }

    pub fn min_pole_distance(&self, z: Complex64) -> f64 {
        self.poles
            .iter()
            .map(|p| (z - p).norm())
            .fold(f64::INFINITY, f64::min)
    }

    fn nearest_pole(&self, z: Complex64) -> Complex64 {
        *self
            .poles
            .iter()
            .min_by(|a, b| (z - *a).norm().partial_cmp(&(z - *b).norm()).unwrap())
            .expect("surrogate has poles")
    }

    /// Evaluate `Ttilde(z) = -B0 + z A0 + sum_i B_i / (z - sigma_i)`.
    pub fn evaluate(&self, z: Complex64) -> Result<CMatrix> {
        if self.m() > 0 && self.min_pole_distance(z) <= self.pole_guard() {
            return Err(Error::AtPole {
                z,
                pole: self.nearest_pole(z),
            });
        }
        let mut t = self.b0.scale(Complex64::new(-1.0, 0.0));
        t.axpy(z, &self.a0);
        for (bi, sigma) in self.b.iter().zip(&self.poles) {
            t.axpy((z - sigma).inv(), bi);
        }
        Ok(t)
    }

    /// `||Ttilde(lambda) u||_2` with unit-normalized `u`.
    pub fn residual_norm(&self, lambda: Complex64, u: &CVector) -> Result<f64> {
        let t = self.evaluate(lambda)?;
        Ok(t.matvec(&u.normalized()).norm2())
    }
}

/// Build the surrogate for a split problem from a rational approximation:
/// `B_i = sum_j alpha_ij A_j`; `B0` and `A0` pass through unchanged.
pub fn build_surrogate(prob: &SplitProblem, ra: &RationalApprox) -> Result<Surrogate> {
    if ra.p() != prob.p() {
        return Err(Error::DimensionMismatch {
            context: "build_surrogate: rational approximation term count",
            expected: prob.p(),
            got: ra.p(),
        });
    }
    let n = prob.dim();
    let mut b = Vec::with_capacity(ra.m());
    for row in &ra.coeffs {
        let mut bi = CMatrix::zeros(n, n);
        for (j, (aj, _)) in prob.terms().iter().enumerate() {
            bi.axpy(row[j], aj);
        }
        b.push(bi);
    }
    #[cfg(debug_assertions)]
    if let (Some(bi), Some(row)) = (b.first(), ra.coeffs.first()) {
        // Spot-check the defining linear combination on the first pole.
        let mut expect = CMatrix::zeros(n, n);
        for (j, (aj, _)) in prob.terms().iter().enumerate() {
            expect.axpy(row[j], aj);
        }
        debug_assert!(bi.sub(&expect).max_norm() == 0.0);
    }
    Ok(Surrogate {
        n,
        b0: prob.b0().clone(),
        a0: prob.a0().clone(),
        poles: ra.poles.clone(),
        b,
    })
}

/// Which functions enter the scaled residual of `scaled_residual_sum`.
pub enum ResidualKind<'a> {
    /// Exact problem: numerator `||T(lambda_i) u_i||`, gamma built from
    /// `|f_j(lambda_i)|`.
    Exact,
    /// Surrogate: numerator `||Ttilde(lambda_i) u_i||`, gamma built from
    /// `|r_j(lambda_i)|`.
    Surrogate(&'a Surrogate, &'a RationalApprox),
}

/// Scaled residual sum over accepted eigenpairs,
///
/// ```text
/// sum_i ||T(lambda_i) u_i|| / gamma,
/// gamma = sum_i ( ||B0|| + |lambda_i| ||A0|| + sum_j |f_j(lambda_i)| ||A_j|| ),
/// ```
///
/// with 2-norms throughout. In the surrogate form, `r_j` replaces `f_j` in
/// both the numerator operator and gamma.
pub fn scaled_residual_sum(
    prob: &SplitProblem,
    norms: &ProblemNorms,
    pairs: &[(Complex64, CVector)],
    kind: ResidualKind<'_>,
) -> Result<f64> {
    assert!(!pairs.is_empty(), "need at least one eigenpair");
    let mut numerator = 0.0;
    let mut gamma = 0.0;
    for (lambda, u) in pairs {
        let uhat = u.normalized();
        let (res, fvals): (f64, Vec<Complex64>) = match &kind {
            ResidualKind::Exact => {
                let t = prob.evaluate_t(*lambda)?;
                let fv = prob.terms().iter().map(|(_, f)| f.eval(*lambda)).collect();
                (t.matvec(&uhat).norm2(), fv)
            }
            ResidualKind::Surrogate(s, ra) => {
                let t = s.evaluate(*lambda)?;
                let fv = (0..ra.p()).map(|j| ra.eval(j, *lambda)).collect();
                (t.matvec(&uhat).norm2(), fv)
            }
        };
        numerator += res;
        let mut g = norms.b0 + lambda.norm() * norms.a0;
        for (j, fv) in fvals.iter().enumerate() {
            g += fv.norm() * norms.terms[j];
        }
        gamma += g;
    }
    Ok(numerator / gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contour::{build_rational_approx, quadrature_rule, Contour};
    use crate::gallery;
    use rand::Rng;
    use rand::SeedableRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn delay_problem_at_zero() {
        let prob = gallery::make_delay(1.0);
        let t0 = prob.evaluate_t(c(0.0, 0.0)).unwrap();
        let expect = CMatrix::from_real_rows(&[&[7.0, -2.0], &[-6.0, 7.0]]);
        assert!(t0.sub(&expect).max_norm() < 1e-15);
    }

    #[test]
    fn evaluate_t_with_no_terms_at_zero_is_minus_b0() {
        let b0 = CMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let prob = SplitProblem::new("pencil", b0.clone(), CMatrix::identity(2), vec![]);
        let t0 = prob.evaluate_t(c(0.0, 0.0)).unwrap();
        assert!(t0.sub(&b0.scale(c(-1.0, 0.0))).max_norm() == 0.0);
    }

    #[test]
    fn fem_problem_at_zero() {
        let prob = gallery::make_fem_string(3);
        let t0 = prob.evaluate_t(c(0.0, 0.0)).unwrap();
        // The boundary factor z/(z-1) vanishes at 0, so T(0) is the
        // stiffness block alone.
        let expect =
            CMatrix::from_real_rows(&[&[6.0, -3.0, 0.0], &[-3.0, 6.0, -3.0], &[0.0, -3.0, 3.0]]);
        assert!(t0.sub(&expect).max_norm() < 1e-15);
    }

    #[test]
    fn surrogate_with_zero_coeffs_has_zero_b() {
        let prob = gallery::make_delay(1.0);
        let ra = RationalApprox {
            poles: vec![c(5.0, 0.0), c(0.0, 5.0)],
            coeffs: vec![vec![c(0.0, 0.0)], vec![c(0.0, 0.0)]],
            scheme: "test".into(),
        };
        let s = build_surrogate(&prob, &ra).unwrap();
        assert!(s.b().iter().all(|bi| bi.max_norm() == 0.0));
    }

    #[test]
    fn surrogate_identity_term_scales_coeffs() {
        let b0 = CMatrix::zeros(2, 2);
        let prob = SplitProblem::new(
            "id",
            b0,
            CMatrix::identity(2),
            vec![(CMatrix::identity(2), ScalarFn::Poly(1))],
        );
        let ra = RationalApprox {
            poles: vec![c(1.0, 0.0), c(-1.0, 0.0)],
            coeffs: vec![vec![c(2.0, 0.0)], vec![c(0.0, 3.0)]],
            scheme: "test".into(),
        };
        let s = build_surrogate(&prob, &ra).unwrap();
        assert!((s.b()[0][(0, 0)] - c(2.0, 0.0)).norm() < 1e-15);
        assert!((s.b()[1][(1, 1)] - c(0.0, 3.0)).norm() < 1e-15);
        assert!(s.b()[0][(0, 1)].norm() == 0.0);
    }

    #[test]
    fn build_surrogate_is_linear_in_coeffs() {
        let prob = gallery::make_delay(1.0);
        let contour = Contour::circle(c(-1.0, 0.0), 6.0);
        let rule = quadrature_rule(&contour, 12).unwrap();
        let f = |z: Complex64| (-z).exp();
        let ra = build_rational_approx(&rule, &[&f]).unwrap();
        let mut ra2 = ra.clone();
        for row in ra2.coeffs.iter_mut() {
            for v in row.iter_mut() {
                *v *= 2.0;
            }
        }
        let s1 = build_surrogate(&prob, &ra).unwrap();
        let s2 = build_surrogate(&prob, &ra2).unwrap();
        for (b1, b2) in s1.b().iter().zip(s2.b()) {
            assert!(b2.sub(&b1.scale(c(2.0, 0.0))).max_norm() == 0.0);
        }
    }

    #[test]
    fn term_count_mismatch_rejected() {
        let prob = gallery::make_delay(1.0);
        let ra = RationalApprox {
            poles: vec![c(5.0, 0.0)],
            coeffs: vec![vec![c(1.0, 0.0), c(2.0, 0.0)]],
            scheme: "test".into(),
        };
        assert!(matches!(
            build_surrogate(&prob, &ra),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn surrogate_eval_trivial_cases() {
        // All B_i = 0: Ttilde(z) = -B0 + z A0.
        let b0 = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let s = Surrogate::from_parts(
            b0.clone(),
            CMatrix::identity(2),
            vec![c(3.0, 0.0)],
            vec![CMatrix::zeros(2, 2)],
        );
        let z = c(0.5, 0.25);
        let t = s.evaluate(z).unwrap();
        let mut expect = b0.scale(c(-1.0, 0.0));
        expect.axpy(z, &CMatrix::identity(2));
        assert!(t.sub(&expect).max_norm() < 1e-15);

        // Single pole at 0, B1 = I, B0 = A0 = 0, z = 2: Ttilde = I/2.
        let s2 = Surrogate::from_parts(
            CMatrix::zeros(2, 2),
            CMatrix::zeros(2, 2),
            vec![c(0.0, 0.0)],
            vec![CMatrix::identity(2)],
        );
        let t2 = s2.evaluate(c(2.0, 0.0)).unwrap();
        assert!(t2.sub(&CMatrix::identity(2).scale(c(0.5, 0.0))).max_norm() < 1e-15);
    }

    #[test]
    fn surrogate_eval_at_pole_fails() {
        let s = Surrogate::from_parts(
            CMatrix::zeros(1, 1),
            CMatrix::identity(1),
            vec![c(2.0, 1.0)],
            vec![CMatrix::identity(1)],
        );
        assert!(matches!(s.evaluate(c(2.0, 1.0)), Err(Error::AtPole { .. })));
    }

    #[test]
    fn approximation_transfer_bound_on_delay() {
        // || Ttilde(z) - T(z) ||_max <= ||A1||_max * e_m at interior points.
        let prob = gallery::make_delay(1.0);
        let contour = Contour::circle(c(-1.0, 0.0), 6.0);
        let rule = quadrature_rule(&contour, 50).unwrap();
        let f = |z: Complex64| (-z).exp();
        let ra = build_rational_approx(&rule, &[&f]).unwrap();
        let s = build_surrogate(&prob, &ra).unwrap();
        let inner = Contour::circle(c(-1.0, 0.0), 3.0);
        let e_m = crate::contour::approx_error(&ra, 0, &f, &inner, 150).unwrap();
        let a1_max = prob.terms()[0].0.max_norm();

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let z = c(-1.0 + rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let diff = s
                .evaluate(z)
                .unwrap()
                .sub(&prob.evaluate_t(z).unwrap())
                .max_norm();
            assert!(
                diff <= a1_max * e_m * (1.0 + 1e-6),
                "diff {diff:.3e} vs bound {:.3e} at z={z}",
                a1_max * e_m
            );
        }
    }

    #[test]
    fn residual_norm_of_exact_pencil_pair() {
        // Pencil: T(z) = -B0 + z I with B0 = diag(1, 2): eigenpair (1, e1).
        let b0 = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let prob = SplitProblem::new("pencil", b0, CMatrix::identity(2), vec![]);
        let r = prob
            .residual_norm(c(1.0, 0.0), &CVector::unit(2, 0))
            .unwrap();
        assert!(r < 1e-14);
    }

    #[test]
    fn residual_norm_is_definitional() {
        let prob = gallery::make_delay(1.0);
        let lambda = c(0.3, -0.4);
        let u = CVector::from_vec(vec![c(1.0, 0.5), c(-0.25, 1.0)]);
        let lhs = prob.residual_norm(lambda, &u).unwrap();
        let rhs = prob.evaluate_t(lambda).unwrap().matvec(&u).norm2() / u.norm2();
        assert!((lhs - rhs).abs() < 1e-13 * rhs.max(1.0));
    }

    #[test]
    fn scaled_residual_trivial_cases() {
        let b0 = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let prob = SplitProblem::new("pencil", b0, CMatrix::identity(2), vec![]);
        let norms = prob.term_norms();
        // Exact pairs of the pencil give zero.
        let pairs = vec![
            (c(1.0, 0.0), CVector::unit(2, 0)),
            (c(2.0, 0.0), CVector::unit(2, 1)),
        ];
        let s = scaled_residual_sum(&prob, &norms, &pairs, ResidualKind::Exact).unwrap();
        assert!(s < 1e-15);
        // A single pair with ||T(lambda)u|| = gamma gives exactly one:
        // T(0) e2 = -B0 e2 = -2 e2, gamma = ||B0|| + 0 = 2.
        let pairs1 = vec![(c(0.0, 0.0), CVector::unit(2, 1))];
        let s1 = scaled_residual_sum(&prob, &norms, &pairs1, ResidualKind::Exact).unwrap();
        assert!((s1 - 1.0).abs() < 1e-6);
    }
}

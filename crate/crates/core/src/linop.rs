//! The implicit linearization `A w = lambda M w` of the surrogate problem
//! and its shifted block solve.
//!
//! With `w = [v_1; ...; v_m; u]`, the pencil blocks are
//!
//! ```text
//! A = [ sigma_1 I              -I  ]      M = [ I            ]
//!     [          ...           ... ]          [    ...       ]
//!     [          sigma_m I     -I  ]          [        I     ]
//!     [ B_1  ...  B_m          B0  ]          [           A0 ]
//! ```
//!
//! Eliminating the top blocks of `A - sigma M` leaves the spectral Schur
//! complement `S(sigma) = B0 - sigma A0 + sum_i B_i / (sigma_i - sigma)`,
//! an n-by-n matrix; one LU of it drives every shift-and-invert apply.
//! The full matrices are materialized only in tests and in the small dense
//! solver.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, LuFactorization};
use crate::nlevp::Surrogate;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Vector in the linearization space, stored as `m` top blocks plus the
/// bottom block, all of length `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockVector {
    pub v: Vec<CVector>,
    pub u: CVector,
}

impl BlockVector {
    pub fn zeros(m: usize, n: usize) -> Self {
        Self {
            v: vec![CVector::zeros(n); m],
            u: CVector::zeros(n),
        }
    }

    pub fn m(&self) -> usize {
        self.v.len()
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn len(&self) -> usize {
        (self.m() + 1) * self.n()
    }

    pub fn is_empty(&self) -> bool {
        self.n() == 0
    }

    /// Standard-normal random block vector from the given generator.
    pub fn random(m: usize, n: usize, rng: &mut impl Rng) -> Self {
        let mut gen = |_: usize| crate::solvers::complex_normal(rng);
        let v = (0..m).map(|_| CVector::from_fn(n, &mut gen)).collect();
        let u = CVector::from_fn(n, &mut gen);
        Self { v, u }
    }

    pub fn flatten(&self) -> CVector {
        let mut data = Vec::with_capacity(self.len());
        for vi in &self.v {
            data.extend_from_slice(vi.as_slice());
        }
        data.extend_from_slice(self.u.as_slice());
        CVector::from_vec(data)
    }

    pub fn from_flat(m: usize, n: usize, flat: &CVector) -> Self {
        assert_eq!(flat.len(), (m + 1) * n);
        let slice = flat.as_slice();
        let v = (0..m)
            .map(|i| CVector::from_vec(slice[i * n..(i + 1) * n].to_vec()))
            .collect();
        let u = CVector::from_vec(slice[m * n..].to_vec());
        Self { v, u }
    }

    pub fn norm2(&self) -> f64 {
        let mut acc = self.u.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>();
        for vi in &self.v {
            acc += vi.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        acc.sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            v: self.v.iter().map(|vi| vi.scale(c)).collect(),
            u: self.u.scale(c),
        }
    }

    pub fn axpy(&mut self, c: Complex64, other: &Self) {
        assert_eq!(self.m(), other.m());
        for (a, b) in self.v.iter_mut().zip(&other.v) {
            a.axpy(c, b);
        }
        self.u.axpy(c, &other.u);
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other);
        out
    }
}

/// Spectral Schur complement `S(z) = B0 - z A0 + sum_i B_i / (sigma_i - z)`.
///
/// Satisfies `S(z) = -Ttilde(z)` off the poles.
pub fn schur_matrix(s: &Surrogate, z: Complex64) -> Result<CMatrix> {
    let t = s.evaluate(z)?;
    Ok(t.scale(Complex64::new(-1.0, 0.0)))
}

/// One factorization drives the whole iteration: the LU of `S(sigma)`
/// plus the pole gaps `sigma_i - sigma`.
#[derive(Clone, Debug)]
pub struct ShiftedFactorization {
    sigma: Complex64,
    schur_lu: LuFactorization,
    pole_gaps: Vec<Complex64>,
}

impl ShiftedFactorization {
    pub fn sigma(&self) -> Complex64 {
        self.sigma
    }

    pub fn pole_gaps(&self) -> &[Complex64] {
        &self.pole_gaps
    }

    pub fn schur_lu(&self) -> &LuFactorization {
        &self.schur_lu
    }
}

/// Factor `S(sigma)`. Fails with `AtPole` when the shift collides with a
/// pole and with `SingularMatrix` when `sigma` is an eigenvalue of the
/// surrogate (the caller should perturb the shift).
pub fn factor_shifted(s: &Surrogate, sigma: Complex64) -> Result<ShiftedFactorization> {
    let sm = schur_matrix(s, sigma)?;
    let schur_lu = LuFactorization::new(&sm)?;
    Ok(ShiftedFactorization {
        sigma,
        schur_lu,
        pole_gaps: s.poles().iter().map(|p| p - sigma).collect(),
    })
}

/// Apply `M`: top blocks pass through, bottom block gets `A0`.
pub fn apply_m(s: &Surrogate, w: &BlockVector) -> BlockVector {
    BlockVector {
        v: w.v.clone(),
        u: s.a0().matvec(&w.u),
    }
}

/// Apply `A`: `out.v_i = sigma_i v_i - u`, `out.u = sum_i B_i v_i + B0 u`.
pub fn apply_a(s: &Surrogate, w: &BlockVector) -> BlockVector {
    let mut out_v = Vec::with_capacity(w.m());
    for (vi, sigma) in w.v.iter().zip(s.poles()) {
        let mut x = vi.scale(*sigma);
        x.axpy(Complex64::new(-1.0, 0.0), &w.u);
        out_v.push(x);
    }
    let mut out_u = s.b0().matvec(&w.u);
    for (bi, vi) in s.b().iter().zip(&w.v) {
        out_u.axpy(ONE, &bi.matvec(vi));
    }
    BlockVector { v: out_v, u: out_u }
}

/// One shift-and-invert step `x = (A - sigma M)^{-1} M w`, through the
/// Schur complement:
///
/// 1. apply `M` (top blocks unchanged, `u <- A0 u`),
/// 2. `b = u - sum_i B_i v_i / (sigma_i - sigma)`,
/// 3. solve `S(sigma) u+ = b`,
/// 4. `v_i+ = (v_i + u+) / (sigma_i - sigma)`.
///
/// Step 4 resolves the top-block equations `(sigma_i - sigma) x_i - x_u
/// = v_i` of the pencil, hence the plus sign.
pub fn apply_shift_invert(
    fac: &ShiftedFactorization,
    s: &Surrogate,
    w: &BlockVector,
) -> BlockVector {
    debug_assert_eq!(w.m(), s.m());
    let mu = s.a0().matvec(&w.u);
    let mut b = mu;
    for ((bi, vi), gap) in s.b().iter().zip(&w.v).zip(&fac.pole_gaps) {
        b.axpy(-gap.inv(), &bi.matvec(vi));
    }
    let u_next = fac.schur_lu.solve(&b);
    let v_next =
        w.v.iter()
            .zip(&fac.pole_gaps)
            .map(|(vi, gap)| {
                let mut x = vi.clone();
                x.axpy(ONE, &u_next);
                x.scale(gap.inv())
            })
            .collect();
    BlockVector {
        v: v_next,
        u: u_next,
    }
}

/// Lift an eigenvector of the rational problem to the linearization space
/// via `v_i = u / (sigma_i - lambda)`.
pub fn lift_eigvec(s: &Surrogate, lambda: Complex64, u: &CVector) -> Result<BlockVector> {
    if s.m() > 0 && s.min_pole_distance(lambda) <= s.pole_guard() {
        let pole = *s
            .poles()
            .iter()
            .min_by(|a, b| {
                (lambda - *a)
                    .norm()
                    .partial_cmp(&(lambda - *b).norm())
                    .unwrap()
            })
            .unwrap();
        return Err(Error::AtPole { z: lambda, pole });
    }
    let v = s
        .poles()
        .iter()
        .map(|sigma| u.scale((sigma - lambda).inv()))
        .collect();
    Ok(BlockVector { v, u: u.clone() })
}

/// Materialize the pencil `(A, M)` explicitly. Test and small-problem use
/// only; everything else goes through the block operators.
pub fn materialize(s: &Surrogate) -> (CMatrix, CMatrix) {
    let n = s.dim();
    let m = s.m();
    let dim = (m + 1) * n;
    let mut a = CMatrix::zeros(dim, dim);
    let mut mm = CMatrix::zeros(dim, dim);
    for (i, sigma) in s.poles().iter().enumerate() {
        for r in 0..n {
            a[(i * n + r, i * n + r)] = *sigma;
            a[(i * n + r, m * n + r)] = Complex64::new(-1.0, 0.0);
            mm[(i * n + r, i * n + r)] = ONE;
        }
    }
    for (i, bi) in s.b().iter().enumerate() {
        for r in 0..n {
            for col in 0..n {
                a[(m * n + r, i * n + col)] = bi[(r, col)];
            }
        }
    }
    for r in 0..n {
        for col in 0..n {
            a[(m * n + r, m * n + col)] = s.b0()[(r, col)];
            mm[(m * n + r, m * n + col)] = s.a0()[(r, col)];
        }
    }
    (a, mm)
}

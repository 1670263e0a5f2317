//! Dense complex eigensolver: Householder reduction to Hessenberg form
//! followed by implicit single-shift QR with Wilkinson shifts, then
//! eigenvector recovery by triangular back-substitution on the Schur factor.

use num_complex::Complex64;

use super::lu::LuFactorization;
use super::matrix::{CMatrix, CVector};
use super::DENSE_EIG_CAP;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const EPS: f64 = f64::EPSILON;

/// Unitary 2x2 rotation `[[c, s], [-conj(s), c]]` with real `c`, chosen so
/// that `G * [a; b] = [r; 0]`.
#[derive(Clone, Copy)]
struct Rotation {
    c: f64,
    s: Complex64,
}

fn make_rotation(a: Complex64, b: Complex64) -> (Rotation, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (Rotation { c: 1.0, s: ZERO }, a);
    }
    if an == 0.0 {
        return (
            Rotation {
                c: 0.0,
                s: b.conj() / bn,
            },
            Complex64::new(bn, 0.0),
        );
    }
    let h = an.hypot(bn);
    let c = an / h;
    let phase = a / an;
    let s = b.conj() * phase / h;
    let r = phase * h;
    (Rotation { c, s }, r)
}

impl Rotation {
    /// Apply from the left to rows `(i, k)` over columns `jlo..jhi`.
    fn apply_left(&self, m: &mut CMatrix, i: usize, k: usize, jlo: usize, jhi: usize) {
        for j in jlo..jhi {
            let x = m[(i, j)];
            let y = m[(k, j)];
            m[(i, j)] = self.c * x + self.s * y;
            m[(k, j)] = -self.s.conj() * x + self.c * y;
        }
    }

    /// Apply the adjoint from the right to columns `(i, k)` over rows
    /// `jlo..jhi` (the similarity partner of `apply_left`).
    fn apply_right(&self, m: &mut CMatrix, i: usize, k: usize, jlo: usize, jhi: usize) {
        for j in jlo..jhi {
            let x = m[(j, i)];
            let y = m[(j, k)];
            m[(j, i)] = self.c * x + self.s.conj() * y;
            m[(j, k)] = -self.s * x + self.c * y;
        }
    }
}

/// Reduce `a` to upper Hessenberg form by Householder reflectors.
/// Returns `(H, Q)` with `a = Q H Q^H`; `Q` is accumulated only when
/// `accumulate` is set.
fn hessenberg(a: &CMatrix, accumulate: bool) -> (CMatrix, Option<CMatrix>) {
    let n = a.rows();
    let mut h = a.clone();
    let mut reflectors: Vec<(usize, Vec<Complex64>, f64)> = Vec::new();

    for k in 0..n.saturating_sub(2) {
        // Householder vector for column k, rows k+1..n.
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let alpha = v[0];
        let phase = if alpha.norm() == 0.0 {
            ONE
        } else {
            alpha / alpha.norm()
        };
        v[0] += phase * xnorm;
        let vnorm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm_sqr == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm_sqr;

        // Left: H[k+1.., k..] -= beta * v (v^H H).
        for j in k..n {
            let mut dot = ZERO;
            for (t, vi) in v.iter().enumerate() {
                dot += vi.conj() * h[(k + 1 + t, j)];
            }
            let f = beta * dot;
            for (t, vi) in v.iter().enumerate() {
                let val = h[(k + 1 + t, j)] - f * vi;
                h[(k + 1 + t, j)] = val;
            }
        }
        // Right: H[.., k+1..] -= beta * (H v) v^H.
        for i in 0..n {
            let mut dot = ZERO;
            for (t, vi) in v.iter().enumerate() {
                dot += h[(i, k + 1 + t)] * vi;
            }
            let f = beta * dot;
            for (t, vi) in v.iter().enumerate() {
                let val = h[(i, k + 1 + t)] - f * vi.conj();
                h[(i, k + 1 + t)] = val;
            }
        }
        // Zero out the annihilated part explicitly.
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
        if accumulate {
            reflectors.push((k, v, beta));
        }
    }

    let q = if accumulate {
        let mut q = CMatrix::identity(n);
        // Q = Q_0 Q_1 ... ; right-multiplying I by each reflector in order.
        for (k, v, beta) in &reflectors {
            for i in 0..n {
                let mut dot = ZERO;
                for (t, vi) in v.iter().enumerate() {
                    dot += q[(i, k + 1 + t)] * vi;
                }
                let f = *beta * dot;
                for (t, vi) in v.iter().enumerate() {
                    let val = q[(i, k + 1 + t)] - f * vi.conj();
                    q[(i, k + 1 + t)] = val;
                }
            }
        }
        Some(q)
    } else {
        None
    };
    (h, q)
}

/// Eigenvalues of a 2x2 matrix; the one closer to `d` first.
fn trailing_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let r1 = (tr + disc) / 2.0;
    let r2 = (tr - disc) / 2.0;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// Schur decomposition `a = Z T Z^H` with `T` upper triangular.
pub fn schur(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let (t, z) = qr_iterate(a, true)?;
    Ok((t, z.expect("accumulation requested")))
}

/// Eigenvalues of `a` (diagonal of the Schur factor), cheaper than a full
/// decomposition because no transformation is accumulated.
pub fn eigenvalues_only(a: &CMatrix) -> Result<Vec<Complex64>> {
    let (t, _) = qr_iterate(a, false)?;
    Ok((0..t.rows()).map(|i| t[(i, i)]).collect())
}

fn qr_iterate(a: &CMatrix, accumulate: bool) -> Result<(CMatrix, Option<CMatrix>)> {
    assert!(a.is_square(), "eigensolver requires a square matrix");
    let n = a.rows();
    if n > DENSE_EIG_CAP {
        return Err(Error::DimensionCap {
            dim: n,
            cap: DENSE_EIG_CAP,
        });
    }
    if n == 0 {
        return Ok((a.clone(), accumulate.then(|| CMatrix::identity(0))));
    }
    let (mut h, q) = hessenberg(a, accumulate);
    let mut z = if accumulate { q } else { None };

    let max_sweeps = 40 * n.max(1);
    let mut sweeps = 0usize;
    let mut hi = n - 1; // active block is rows/cols lo..=hi
    let mut stagnation = 0usize;

    while hi > 0 {
        // Deflate converged subdiagonals at the bottom of the active block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let local = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let tol = EPS * if local > 0.0 { local } else { h.max_norm() };
            if sub <= tol {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            // 1x1 block converged.
            hi -= 1;
            stagnation = 0;
            continue;
        }

        sweeps += 1;
        stagnation += 1;
        if sweeps > max_sweeps {
            return Err(Error::ConvergenceFailure { sweeps });
        }

        // Shift: Wilkinson from the trailing 2x2, with an exceptional shift
        // every 12 stalled sweeps to break symmetry cycles.
        let mu = if stagnation % 12 == 0 {
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            trailing_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        // Implicit single-shift sweep on lo..=hi: the first rotation is built
        // from the shifted leading column, the rest chase the bulge down.
        let mut x = h[(lo, lo)] - mu;
        let mut y = h[(lo + 1, lo)];
        for i in lo..hi {
            let (g, _) = make_rotation(x, y);
            let jlo = i.saturating_sub(1).max(lo);
            g.apply_left(&mut h, i, i + 1, jlo, n);
            let rhi = (i + 2).min(hi) + 1;
            g.apply_right(&mut h, i, i + 1, 0, rhi);
            if let Some(zm) = z.as_mut() {
                let rows = zm.rows();
                g.apply_right(zm, i, i + 1, 0, rows);
            }
            if i > lo {
                // This rotation annihilated the bulge below the subdiagonal.
                h[(i + 1, i - 1)] = ZERO;
            }
            if i + 2 <= hi {
                x = h[(i + 1, i)];
                y = h[(i + 2, i)];
            }
        }
    }

    // Clean the strictly lower part so T is exactly triangular.
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok((h, z))
}

/// Right eigenvector of an upper triangular `t` for the eigenvalue at
/// diagonal position `k`, by back-substitution.
fn triangular_eigvec(t: &CMatrix, k: usize) -> CVector {
    let n = t.rows();
    let lambda = t[(k, k)];
    let scale = t.max_norm().max(1.0);
    let mut x = vec![ZERO; n];
    x[k] = ONE;
    for i in (0..k).rev() {
        let mut acc = ZERO;
        for j in (i + 1)..=k {
            acc += t[(i, j)] * x[j];
        }
        let mut den = t[(i, i)] - lambda;
        if den.norm() < EPS * scale {
            den = Complex64::new(EPS * scale, 0.0);
        }
        x[i] = -acc / den;
        // Rescale to stay inside the double range on clustered spectra.
        let m = x[i].norm();
        if m > 1e100 {
            for xv in x.iter_mut() {
                *xv /= m;
            }
        }
    }
    CVector::from_vec(x).normalized()
}

/// Eigenvalues and unit right eigenvectors of a dense complex matrix.
///
/// Every returned pair satisfies `||A x - lambda x|| <= tol_eig * ||A||`
/// for well-behaved inputs (see [`super::TOL_EIG`]).
pub fn dense_eig(a: &CMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    let n = a.rows();
    let (t, z) = schur(a)?;
    let values: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for k in 0..n {
        let y = triangular_eigvec(&t, k);
        let x = z.matvec(&y).normalized();
        vectors.set_column(k, &x);
    }
    Ok((values, vectors))
}

/// Sort the diagonal of a Schur form in place, descending by `key`, using
/// unitary swaps of adjacent diagonal entries; `z` receives the same
/// transformations.
pub fn schur_reorder(t: &mut CMatrix, z: &mut CMatrix, key: impl Fn(Complex64) -> f64) {
    let n = t.rows();
    if n < 2 {
        return;
    }
    // Bubble sort: only adjacent swaps are unitary-exact.
    loop {
        let mut swapped = false;
        for k in 0..n - 1 {
            let a = t[(k, k)];
            let d = t[(k + 1, k + 1)];
            if key(d) > key(a) + 0.0 {
                swap_adjacent(t, z, k);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
}

fn swap_adjacent(t: &mut CMatrix, z: &mut CMatrix, k: usize) {
    let n = t.rows();
    let a = t[(k, k)];
    let b = t[(k, k + 1)];
    let d = t[(k + 1, k + 1)];
    if (a - d).norm() == 0.0 {
        return; // identical eigenvalues, nothing to move
    }
    // Eigenvector of [[a, b], [0, d]] for d is [b; d - a].
    let (g, _) = make_rotation(b, d - a);
    g.apply_left(t, k, k + 1, 0, n);
    g.apply_right(t, k, k + 1, 0, n);
    let rows = z.rows();
    g.apply_right(z, k, k + 1, 0, rows);
    t[(k + 1, k)] = ZERO;
}

/// Result of a generalized eigensolve `A x = lambda M x`.
///
/// Infinite eigenvalues (null directions of `M` when the pencil is
/// regular) are marked by `finite[i] == false`; their `values[i]` entry is
/// meaningless.
#[derive(Clone, Debug)]
pub struct GeigResult {
    pub values: Vec<Complex64>,
    pub finite: Vec<bool>,
    pub vectors: CMatrix,
}

/// Generalized dense eigensolver.
///
/// When `M` is comfortably invertible this is `dense_eig(M^-1 A)`. When it
/// is singular or badly conditioned, the pencil is shifted: eigenvalues of
/// `(A - s M)^-1 M` are `1/(lambda - s)`, which handles singular `M`
/// (infinite eigenvalues land at zero) without a QZ sweep. The shift is
/// picked deterministically from a candidate list.
pub fn dense_geig(a: &CMatrix, m: &CMatrix) -> Result<GeigResult> {
    assert_eq!(a.rows(), m.rows(), "pencil matrices must agree in size");
    assert!(a.is_square() && m.is_square());
    if let Ok(lum) = LuFactorization::new(m) {
        if lum.pivot_ratio() >= 1e-10 {
            let x = lum.solve_matrix(a);
            let (values, vectors) = dense_eig(&x)?;
            let finite = vec![true; values.len()];
            return Ok(GeigResult {
                values,
                finite,
                vectors,
            });
        }
    }
    let scale = if m.max_norm() > 0.0 {
        (a.max_norm() / m.max_norm()).max(1.0)
    } else {
        1.0
    };
    let candidates = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.61803398875, 0.31415926535),
        Complex64::new(-1.32471795724, 0.75487766625),
        Complex64::new(2.43507, -1.52871),
    ];
    for cand in candidates {
        let sigma = cand * scale;
        let shifted = a.add_scaled(-sigma, m);
        let lu = match LuFactorization::new(&shifted) {
            Ok(f) => f,
            Err(_) => continue,
        };
        if lu.pivot_ratio() < 1e-13 {
            continue;
        }
        let y = lu.solve_matrix(m);
        let (thetas, vectors) = dense_eig(&y)?;
        let theta_max = thetas.iter().map(|t| t.norm()).fold(0.0, f64::max);
        let cut = 1e-10 * theta_max.max(f64::MIN_POSITIVE);
        let mut values = Vec::with_capacity(thetas.len());
        let mut finite = Vec::with_capacity(thetas.len());
        for th in &thetas {
            if th.norm() <= cut {
                values.push(Complex64::new(f64::INFINITY, 0.0));
                finite.push(false);
            } else {
                values.push(sigma + 1.0 / th);
                finite.push(true);
            }
        }
        return Ok(GeigResult {
            values,
            finite,
            vectors,
        });
    }
    // Every shift collided with the spectrum: the pencil is singular.
    Err(Error::SingularMatrix {
        step: 0,
        pivot: 0.0,
        threshold: 0.0,
    })
}

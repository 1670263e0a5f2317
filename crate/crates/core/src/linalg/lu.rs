use num_complex::Complex64;

use super::matrix::{CMatrix, CVector};
use crate::error::{Error, Result};

/// Relative pivot threshold below which a matrix is declared singular.
pub const DEFAULT_PIVOT_TOL: f64 = 1e-14;

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct LuFactorization {
    /// Packed L (unit lower, implicit diagonal) and U factors.
    lu: CMatrix,
    /// Row permutation: `perm[i]` is the original row now in position `i`.
    perm: Vec<usize>,
    /// Number of row swaps performed (determinant sign).
    swaps: usize,
}

/// Determinant in log-magnitude + phase form, so products of thousands of
/// pivots cannot overflow the double range.
#[derive(Clone, Copy, Debug)]
pub struct LogDet {
    /// ln |det|; `f64::NEG_INFINITY` for an exactly zero determinant.
    pub log_mag: f64,
    /// arg(det), wrapped to (-pi, pi].
    pub phase: f64,
}

impl LogDet {
    pub fn product(self, other: LogDet) -> LogDet {
        LogDet {
            log_mag: self.log_mag + other.log_mag,
            phase: wrap_phase(self.phase + other.phase),
        }
    }

    pub fn from_complex(z: Complex64) -> LogDet {
        LogDet {
            log_mag: z.norm().ln(),
            phase: z.arg(),
        }
    }

    /// Raise to an integer power.
    pub fn powi(self, k: i32) -> LogDet {
        LogDet {
            log_mag: self.log_mag * k as f64,
            phase: wrap_phase(self.phase * k as f64),
        }
    }

    /// The plain complex value; overflows to infinity for large magnitudes.
    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.log_mag.exp(), self.phase)
    }
}

pub fn wrap_phase(p: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = p % two_pi;
    if x > std::f64::consts::PI {
        x -= two_pi;
    } else if x <= -std::f64::consts::PI {
        x += two_pi;
    }
    x
}

impl LuFactorization {
    /// Factor a square matrix with partial pivoting. Fails with
    /// `SingularMatrix` when a pivot magnitude falls below
    /// `pivot_tol * max|A_ij|`.
    pub fn new(a: &CMatrix) -> Result<Self> {
        Self::with_tol(a, DEFAULT_PIVOT_TOL)
    }

    pub fn with_tol(a: &CMatrix, pivot_tol: f64) -> Result<Self> {
        assert!(a.is_square(), "LU factorization requires a square matrix");
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0usize;
        let threshold = pivot_tol * a.max_norm();

        for k in 0..n {
            // Pivot search in column k.
            let mut p = k;
            let mut pmag = lu[(k, k)].norm();
            for i in (k + 1)..n {
                let m = lu[(i, k)].norm();
                if m > pmag {
                    pmag = m;
                    p = i;
                }
            }
            if pmag <= threshold {
                return Err(Error::SingularMatrix {
                    step: k,
                    pivot: pmag,
                    threshold,
                });
            }
            if p != k {
                swap_rows(&mut lu, p, k);
                perm.swap(p, k);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let mult = lu[(i, k)] / pivot;
                lu[(i, k)] = mult;
                if mult != Complex64::new(0.0, 0.0) {
                    let (top, bottom) = split_rows(&mut lu, k, i);
                    let urow = &top[k + 1..];
                    let lrow = &mut bottom[k + 1..];
                    for (l, u) in lrow.iter_mut().zip(urow) {
                        *l -= mult * u;
                    }
                }
            }
        }
        Ok(Self { lu, perm, swaps })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &CVector) -> CVector {
        let n = self.dim();
        assert_eq!(b.len(), n, "rhs length mismatch");
        // Forward substitution on P b.
        let mut x: Vec<Complex64> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 1..n {
            let row = self.lu.row(i);
            let mut acc = x[i];
            for j in 0..i {
                acc -= row[j] * x[j];
            }
            x[i] = acc;
        }
        // Back substitution.
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc -= row[j] * x[j];
            }
            x[i] = acc / row[i];
        }
        CVector::from_vec(x)
    }

    /// Solve for every column of `B` at once.
    pub fn solve_matrix(&self, b: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            out.set_column(j, &self.solve(&b.column(j)));
        }
        out
    }

    /// Solve `A^H x = b` using the same factorization:
    /// `A^H = U^H L^H P`, so solve `U^H y = b`, `L^H z = y`, `x = P^H z`.
    pub fn solve_adjoint(&self, b: &CVector) -> CVector {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        // U^H is lower triangular with diagonal conj(U_ii).
        for i in 0..n {
            let mut acc = b[i];
            for j in 0..i {
                acc -= self.lu[(j, i)].conj() * y[j];
            }
            y[i] = acc / self.lu[(i, i)].conj();
        }
        // L^H is unit upper triangular.
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in (i + 1)..n {
                acc -= self.lu[(j, i)].conj() * y[j];
            }
            y[i] = acc;
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (pos, &orig) in self.perm.iter().enumerate() {
            x[orig] = y[pos];
        }
        CVector::from_vec(x)
    }

    /// Determinant as product of pivots, permutation sign included.
    pub fn log_det(&self) -> LogDet {
        let n = self.dim();
        let mut log_mag = 0.0;
        let mut phase = if self.swaps % 2 == 0 {
            0.0
        } else {
            std::f64::consts::PI
        };
        for i in 0..n {
            let p = self.lu[(i, i)];
            log_mag += p.norm().ln();
            phase = wrap_phase(phase + p.arg());
        }
        LogDet { log_mag, phase }
    }

    /// Ratio of smallest to largest pivot magnitude; a cheap conditioning
    /// proxy used to pick between generalized-eigensolver paths.
    pub fn pivot_ratio(&self) -> f64 {
        let mags: Vec<f64> = (0..self.dim()).map(|i| self.lu[(i, i)].norm()).collect();
        let max = mags.iter().cloned().fold(0.0, f64::max);
        let min = mags.iter().cloned().fold(f64::INFINITY, f64::min);
        if max == 0.0 {
            0.0
        } else {
            min / max
        }
    }
}

fn swap_rows(m: &mut CMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    let cols = m.cols();
    let (lo, hi) = (a.min(b), a.max(b));
    let data = m.data_mut();
    let (first, second) = data.split_at_mut(hi * cols);
    first[lo * cols..(lo + 1) * cols].swap_with_slice(&mut second[..cols]);
}

/// Borrow row `top` immutably and row `bottom` mutably (top < bottom).
fn split_rows(m: &mut CMatrix, top: usize, bottom: usize) -> (&[Complex64], &mut [Complex64]) {
    debug_assert!(top < bottom);
    let cols = m.cols();
    let data = m.data_mut();
    let (head, tail) = data.split_at_mut(bottom * cols);
    (&head[top * cols..(top + 1) * cols], &mut tail[..cols])
}

/// Determinant of `A` via LU; an exactly singular matrix gets
/// `log_mag = -inf`.
pub fn log_det(a: &CMatrix) -> LogDet {
    match LuFactorization::with_tol(a, 0.0) {
        Ok(f) => f.log_det(),
        Err(_) => LogDet {
            log_mag: f64::NEG_INFINITY,
            phase: 0.0,
        },
    }
}

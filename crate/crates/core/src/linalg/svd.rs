//! Thin complex SVD by one-sided Jacobi, sized for the short, fat-free
//! probe matrices of the contour-integral baseline (n x l with small l).

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Thin SVD `A = U diag(sigma) V^H` with `sigma` nonincreasing.
///
/// `U` is `n x l` with orthonormal columns (columns for exactly-zero
/// singular values are zero), `V` is `l x l` unitary.
pub fn beyn_svd(a: &CMatrix) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    let n = a.rows();
    let l = a.cols();
    let mut work = a.clone();
    let mut v = CMatrix::identity(l);
    let tol = 1e-14;

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..l {
            for q in (p + 1)..l {
                let (app, aqq, apq) = gram(&work, p, q);
                let denom = (app * aqq).sqrt();
                if denom == 0.0 || apq.norm() <= tol * denom {
                    continue;
                }
                rotated = true;
                let abs_apq = apq.norm();
                let phase = apq / abs_apq;
                let tau = (aqq - app) / (2.0 * abs_apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut work, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged && l > 1 {
        return Err(Error::ConvergenceFailure { sweeps: MAX_SWEEPS });
    }

    let mut sigma: Vec<f64> = (0..l).map(|j| work.column(j).norm2()).collect();
    let mut u = CMatrix::zeros(n, l);
    for j in 0..l {
        if sigma[j] > 0.0 {
            let col = work.column(j).scale(Complex64::new(1.0 / sigma[j], 0.0));
            u.set_column(j, &col);
        }
    }

    // Sort singular values into nonincreasing order.
    let mut order: Vec<usize> = (0..l).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap());
    let u_sorted = CMatrix::from_fn(n, l, |i, j| u[(i, order[j])]);
    let v_sorted = CMatrix::from_fn(l, l, |i, j| v[(i, order[j])]);
    sigma = order.iter().map(|&j| sigma[j]).collect();

    Ok((u_sorted, sigma, v_sorted))
}

fn gram(a: &CMatrix, p: usize, q: usize) -> (f64, f64, Complex64) {
    let mut app = 0.0;
    let mut aqq = 0.0;
    let mut apq = Complex64::new(0.0, 0.0);
    for i in 0..a.rows() {
        let x = a[(i, p)];
        let y = a[(i, q)];
        app += x.norm_sqr();
        aqq += y.norm_sqr();
        apq += x.conj() * y;
    }
    (app, aqq, apq)
}

/// Right-multiply columns (p, q) by the unitary Jacobi rotation
/// `[[c, s*phi], [-s*conj(phi), c]]` with `phi = e^{i arg(a_p^H a_q)}`.
fn rotate(a: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    for i in 0..a.rows() {
        let x = a[(i, p)];
        let y = a[(i, q)];
        a[(i, p)] = c * x - s * phase.conj() * y;
        a[(i, q)] = s * phase * x + c * y;
    }
}

use num_complex::Complex64;

use super::matrix::CMatrix;

/// Drop tolerance relative to a column's initial norm.
const DROP_TOL: f64 = 1e-12;

/// Modified Gram-Schmidt orthonormalization with one re-orthogonalization
/// pass (twice is enough). Columns whose projection remainder falls below
/// `1e-12` times their initial norm are dropped; the returned matrix keeps
/// only the surviving columns, in order.
///
/// Rank zero is a legal outcome: the result is then an `n x 0` matrix.
pub fn mgs_orthonormalize(w: &CMatrix) -> (CMatrix, usize) {
    let n = w.rows();
    let mut q: Vec<Vec<Complex64>> = Vec::new();

    for j in 0..w.cols() {
        let mut col: Vec<Complex64> = (0..n).map(|i| w[(i, j)]).collect();
        let initial = norm(&col);
        if initial == 0.0 {
            continue;
        }
        for _pass in 0..2 {
            for qk in &q {
                let h = dot(qk, &col);
                for (c, qv) in col.iter_mut().zip(qk) {
                    *c -= h * qv;
                }
            }
        }
        let remaining = norm(&col);
        if remaining < DROP_TOL * initial {
            continue;
        }
        let inv = Complex64::new(1.0 / remaining, 0.0);
        for c in col.iter_mut() {
            *c *= inv;
        }
        q.push(col);
    }

    let rank = q.len();
    let out = CMatrix::from_fn(n, rank, |i, j| q[j][i]);
    (out, rank)
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

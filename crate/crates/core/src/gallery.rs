//! Built-in test problems with their standard experiment configurations,
//! plus a plain-text problem directory format for externally supplied
//! matrices.

use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;

use crate::contour::Contour;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::nlevp::{ScalarFn, SplitProblem};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Characteristic equation of the delay system
/// `x'(t) = -B0 x(t) + A1 x(t - tau)`:
/// `T(z) = -B0 + z I + e^{-z tau} A1`, with the standard 2x2 matrices.
pub fn make_delay(tau: f64) -> SplitProblem {
    assert!(tau > 0.0, "delay must be positive");
    let b0 = CMatrix::from_real_rows(&[&[-5.0, 1.0], &[2.0, -6.0]]);
    let a1 = CMatrix::from_real_rows(&[&[2.0, -1.0], &[-4.0, 1.0]]);
    SplitProblem::new(
        "delay",
        b0,
        CMatrix::identity(2),
        vec![(a1, ScalarFn::Exp(-tau))],
    )
}

/// Finite-element discretization of the loaded string: stiffness `B0`,
/// mass-carrying `A0`, and the boundary term `z/(z-1) e_n e_n^T` whose
/// pole at `z = 1` comes from the attached load.
///
/// `T(z) = B0 + z A0 + (z/(z-1)) e_n e_n^T`, brought to split form by
/// negating `B0`. The rational factor is `z/(z-1)`, the form this problem
/// carries in its original sources; the variant with `1/(1-z)` printed in
/// some later write-ups has a different (and complex) interior spectrum.
pub fn make_fem_string(n: usize) -> SplitProblem {
    assert!(n >= 2);
    let b0_fem = fem_stiffness(n);
    let a0 = fem_mass_term(n);
    let mut a1 = CMatrix::zeros(n, n);
    a1[(n - 1, n - 1)] = c(1.0, 0.0);
    let f = ScalarFn::Custom(
        std::sync::Arc::new(|z: Complex64| z / (z - 1.0)),
        "z/(z-1)".into(),
    );
    // Split form carries -B0, so negate the FEM stiffness block.
    SplitProblem::new("fem-string", b0_fem.scale(c(-1.0, 0.0)), a0, vec![(a1, f)])
}

fn fem_stiffness(n: usize) -> CMatrix {
    let nf = n as f64;
    CMatrix::from_fn(n, n, |i, j| {
        let v = if i == j {
            if i == n - 1 {
                1.0
            } else {
                2.0
            }
        } else if i.abs_diff(j) == 1 {
            -1.0
        } else {
            0.0
        };
        c(nf * v, 0.0)
    })
}

fn fem_mass_term(n: usize) -> CMatrix {
    let nf = n as f64;
    CMatrix::from_fn(n, n, |i, j| {
        let v = if i == j {
            if i == n - 1 {
                2.0
            } else {
                4.0
            }
        } else if i.abs_diff(j) == 1 {
            1.0
        } else {
            0.0
        };
        c(-v / (6.0 * nf), 0.0)
    })
}

/// Exact (quadrature-free) linearization of the string problem: a `2n x 2n`
/// pencil whose finite eigenvalues are exactly the eigenvalues of the
/// nonlinear problem, except for a spurious eigenvalue at the pole `z = 1`
/// (multiplicity `n - 1`) whose eigenvectors have a vanishing bottom
/// block. With `x = u/(1-z)` and `z/(z-1) = 1 - 1/(1-z)`:
///
/// ```text
/// [ I        -I             ] [x]     [ I   0   ] [x]
/// [ -e_n e_n^T  B0+e_n e_n^T] [u] = z [ 0  -A0  ] [u]
/// ```
pub fn make_exact_fem_linearization(n: usize) -> (CMatrix, CMatrix) {
    assert!(n >= 2);
    let b0_fem = fem_stiffness(n);
    let a0 = fem_mass_term(n);
    let mut a = CMatrix::zeros(2 * n, 2 * n);
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        a[(i, i)] = c(1.0, 0.0);
        a[(i, n + i)] = c(-1.0, 0.0);
        m[(i, i)] = c(1.0, 0.0);
    }
    a[(2 * n - 1, n - 1)] = c(-1.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            a[(n + i, n + j)] = b0_fem[(i, j)];
            m[(n + i, n + j)] = -a0[(i, j)];
        }
    }
    a[(2 * n - 1, 2 * n - 1)] += c(1.0, 0.0);
    (a, m)
}

/// The Hadeler problem `T(z) = (e^z - 1) B1 + z^2 B2 - B0` with
/// `B0 = b0 I` and the classical formula-defined `B1`, `B2` (1-based
/// indices). There is no linear-in-z term, so `A0 = 0` and the mass of the
/// linearization is singular; only the shift-and-invert based solvers
/// apply.
pub fn make_hadeler(n: usize, b0: f64) -> SplitProblem {
    assert!(n >= 1 && b0 > 0.0);
    let nf = n as f64;
    let b1 = CMatrix::from_fn(n, n, |i, j| {
        let (row, col) = (i as f64 + 1.0, j as f64 + 1.0);
        c((nf + 1.0 - row.max(col)) * row * col, 0.0)
    });
    let b2 = CMatrix::from_fn(n, n, |i, j| {
        let (row, col) = (i as f64 + 1.0, j as f64 + 1.0);
        let diag = if i == j { nf } else { 0.0 };
        c(diag + 1.0 / (row + col), 0.0)
    });
    let b0m = CMatrix::identity(n).scale(c(b0, 0.0));
    let expm1 = ScalarFn::Custom(Arc::new(|z: Complex64| z.exp() - 1.0), "expm1".into());
    SplitProblem::new(
        "hadeler",
        b0m,
        CMatrix::zeros(n, n),
        vec![(b1, expm1), (b2, ScalarFn::Poly(2))],
    )
}

/// Quadratic problem used to illustrate the halo of extraneous
/// eigenvalues: `(-B0 + z A0 + z^2 A2) u = 0` with matrices replicating
/// the generating code: `B0` the second-difference stencil, `A0 = I`,
/// `A2 = (n I - E_row1 - E_col1) / 2` where `E_row1` has ones in the first
/// row and `E_col1` ones in the first column.
pub fn make_quadratic_halo(n: usize) -> SplitProblem {
    assert!(n >= 2);
    let b0 = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            c(-2.0, 0.0)
        } else if i.abs_diff(j) == 1 {
            c(1.0, 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    let a2 = CMatrix::from_fn(n, n, |i, j| {
        let mut v = if i == j { n as f64 } else { 0.0 };
        if i == 0 {
            v -= 1.0;
        }
        if j == 0 {
            v -= 1.0;
        }
        c(0.5 * v, 0.0)
    });
    SplitProblem::new(
        "quadratic-halo",
        b0,
        CMatrix::identity(n),
        vec![(a2, ScalarFn::Poly(2))],
    )
}

/// A gallery problem bundled with the experiment configuration it is
/// normally run with.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub problem: SplitProblem,
    pub contour: Contour,
    /// Quadrature node count for the rational approximation.
    pub m: usize,
    /// Expected number of eigenvalues inside the contour.
    pub expected_inside: usize,
}

/// Look up a named gallery experiment.
pub fn experiment(name: &str) -> Option<Experiment> {
    match name {
        "delay" => Some(Experiment {
            problem: make_delay(1.0),
            contour: Contour::circle(c(-1.0, 0.0), 6.0),
            m: 50,
            expected_inside: 5,
        }),
        "delay-rectangle" => Some(Experiment {
            problem: make_delay(1.0),
            contour: Contour::rectangle(c(-3.0, -6.0), c(1.0, 6.0)),
            m: 40,
            expected_inside: 5,
        }),
        "fem" => Some(Experiment {
            problem: make_fem_string(100),
            contour: Contour::circle(c(150.0, 0.0), 150.0),
            m: 6,
            expected_inside: 5,
        }),
        "hadeler" => Some(Experiment {
            problem: make_hadeler(200, 100.0),
            contour: Contour::circle(c(-30.0, 0.0), 10.0),
            m: 50,
            expected_inside: 12,
        }),
        "hadeler-ellipse" => Some(Experiment {
            problem: make_hadeler(200, 100.0),
            contour: Contour::ellipse(c(-30.0, 0.0), 10.0, 1.0),
            m: 8,
            expected_inside: 12,
        }),
        "quadratic" => Some(Experiment {
            problem: make_quadratic_halo(4),
            contour: Contour::rectangle(c(-1.0, -1.5), c(0.0, 1.5)),
            m: 60,
            expected_inside: 8,
        }),
        _ => None,
    }
}

/// Names accepted by [`experiment`].
pub fn experiment_names() -> &'static [&'static str] {
    &[
        "delay",
        "delay-rectangle",
        "fem",
        "hadeler",
        "hadeler-ellipse",
        "quadratic",
    ]
}

// ---------------------------------------------------------------------
// Problem directory format
//
// manifest.json:
//   { "n": 2, "p": 1, "b0": "b0.mat", "a0": "a0.mat",
//     "terms": [ { "matrix": "a1.mat", "function": "exp(-1)" } ] }
//
// Matrix files: first line "rows cols", then rows*cols lines "re im" in
// row-major order.
// ---------------------------------------------------------------------

#[derive(serde::Serialize, serde::Deserialize)]
struct Manifest {
    name: Option<String>,
    n: usize,
    p: usize,
    b0: String,
    a0: String,
    terms: Vec<ManifestTerm>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct ManifestTerm {
    matrix: String,
    function: String,
}

/// Load a split problem from a directory containing a manifest and one
/// plain-text matrix file per block.
pub fn load_problem(path: impl AsRef<Path>) -> Result<SplitProblem> {
    let dir = path.as_ref();
    let manifest_path = dir.join("manifest.json");
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::ParseError {
        file: manifest_path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| Error::ParseError {
        file: manifest_path.display().to_string(),
        line: e.line(),
        message: e.to_string(),
    })?;
    if manifest.terms.len() != manifest.p {
        return Err(Error::ParseError {
            file: manifest_path.display().to_string(),
            line: 0,
            message: format!(
                "manifest lists p = {} but {} terms",
                manifest.p,
                manifest.terms.len()
            ),
        });
    }
    let b0 = read_matrix(&dir.join(&manifest.b0), manifest.n)?;
    let a0 = read_matrix(&dir.join(&manifest.a0), manifest.n)?;
    let mut terms = Vec::with_capacity(manifest.p);
    for (idx, term) in manifest.terms.iter().enumerate() {
        let m = read_matrix(&dir.join(&term.matrix), manifest.n)?;
        let f = parse_descriptor(&term.function, idx)?;
        terms.push((m, f));
    }
    let name = manifest.name.unwrap_or_else(|| "file-problem".to_string());
    Ok(SplitProblem::new(name, b0, a0, terms))
}

/// Write a split problem into a directory in the plain-text format.
/// Terms whose function is outside the descriptor vocabulary serialize as
/// `user-unsupported` and will be rejected on reload.
pub fn save_problem(prob: &SplitProblem, path: impl AsRef<Path>) -> Result<()> {
    let dir = path.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::ParseError {
        file: dir.display().to_string(),
        line: 0,
        message: e.to_string(),
    })?;
    write_matrix(&dir.join("b0.mat"), prob.b0())?;
    write_matrix(&dir.join("a0.mat"), prob.a0())?;
    let mut terms = Vec::new();
    for (idx, (m, f)) in prob.terms().iter().enumerate() {
        let fname = format!("a{}.mat", idx + 1);
        write_matrix(&dir.join(&fname), m)?;
        terms.push(ManifestTerm {
            matrix: fname,
            function: f.descriptor(),
        });
    }
    let manifest = Manifest {
        name: Some(prob.name().to_string()),
        n: prob.dim(),
        p: prob.p(),
        b0: "b0.mat".into(),
        a0: "a0.mat".into(),
        terms,
    };
    let out = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(dir.join("manifest.json"), out).map_err(|e| Error::ParseError {
        file: dir.display().to_string(),
        line: 0,
        message: e.to_string(),
    })?;
    Ok(())
}

fn read_matrix(path: &Path, expect_n: usize) -> Result<CMatrix> {
    let err = |line: usize, message: String| Error::ParseError {
        file: path.display().to_string(),
        line,
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| err(0, e.to_string()))?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (lno, header) = lines
        .next()
        .ok_or_else(|| err(0, "empty matrix file".into()))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(err(
            lno + 1,
            format!("expected \"rows cols\", got {header:?}"),
        ));
    }
    let rows: usize = dims[0]
        .parse()
        .map_err(|_| err(lno + 1, format!("bad row count {:?}", dims[0])))?;
    let cols: usize = dims[1]
        .parse()
        .map_err(|_| err(lno + 1, format!("bad column count {:?}", dims[1])))?;
    if rows != expect_n || cols != expect_n {
        return Err(err(
            lno + 1,
            format!("expected {expect_n}x{expect_n} matrix, file declares {rows}x{cols}"),
        ));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (lno, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(err(lno + 1, format!("expected \"re im\", got {line:?}")));
        }
        let re: f64 = parts[0]
            .parse()
            .map_err(|_| err(lno + 1, format!("bad real part {:?}", parts[0])))?;
        let im: f64 = parts[1]
            .parse()
            .map_err(|_| err(lno + 1, format!("bad imaginary part {:?}", parts[1])))?;
        data.push(c(re, im));
        if data.len() > rows * cols {
            return Err(err(lno + 1, "more entries than rows*cols".into()));
        }
    }
    if data.len() != rows * cols {
        return Err(err(
            0,
            format!("expected {} entries, found {}", rows * cols, data.len()),
        ));
    }
    Ok(CMatrix::from_row_major(rows, cols, data))
}

fn write_matrix(path: &Path, m: &CMatrix) -> Result<()> {
    let mut out = Vec::new();
    writeln!(out, "{} {}", m.rows(), m.cols()).unwrap();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let z = m[(i, j)];
            writeln!(out, "{:.17e} {:.17e}", z.re, z.im).unwrap();
        }
    }
    fs::write(path, out).map_err(|e| Error::ParseError {
        file: path.display().to_string(),
        line: 0,
        message: e.to_string(),
    })
}

/// Parse a function descriptor from the fixed vocabulary
/// `poly(d) | exp(a) | recip(re[,im])`.
fn parse_descriptor(text: &str, term: usize) -> Result<ScalarFn> {
    let unknown = || Error::UnknownFunctionDescriptor {
        descriptor: text.to_string(),
        term,
    };
    let t = text.trim();
    let (head, rest) = match t.split_once('(') {
        Some((h, r)) if r.ends_with(')') => (h.trim(), &r[..r.len() - 1]),
        _ => return Err(unknown()),
    };
    match head {
        "poly" => {
            let d: u32 = rest.trim().parse().map_err(|_| unknown())?;
            Ok(ScalarFn::Poly(d))
        }
        "exp" => {
            let a: f64 = rest.trim().parse().map_err(|_| unknown())?;
            Ok(ScalarFn::Exp(a))
        }
        "recip" => {
            let parts: Vec<&str> = rest.split(',').collect();
            match parts.as_slice() {
                [re] => {
                    let re: f64 = re.trim().parse().map_err(|_| unknown())?;
                    Ok(ScalarFn::Recip(c(re, 0.0)))
                }
                [re, im] => {
                    let re: f64 = re.trim().parse().map_err(|_| unknown())?;
                    let im: f64 = im.trim().parse().map_err(|_| unknown())?;
                    Ok(ScalarFn::Recip(c(re, im)))
                }
                _ => Err(unknown()),
            }
        }
        _ => Err(unknown()),
    }
}

//! Contour geometry, quadrature on the contour, and the shared-pole
//! rational approximation of the scalar functions.
//!
//! The Cauchy integral of a function holomorphic inside the closed contour
//! `Gamma`,
//!
//! ```text
//! f(z) = -1/(2 pi i) * integral over Gamma of f(t) / (z - t) dt,
//! ```
//!
//! is discretized with quadrature nodes `sigma_k` on `Gamma`; the
//! `-1/(2 pi i)` factor and the parametrization derivative are folded into
//! the stored weights, so the approximation reads literally
//! `r(z) = sum_k alpha_k / (z - sigma_k)` with `alpha_k = w_k f(sigma_k)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Closed integration contour, counterclockwise by definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum Contour {
    Circle {
        center: (f64, f64),
        radius: f64,
    },
    Ellipse {
        center: (f64, f64),
        semi_major_x: f64,
        semi_minor_y: f64,
    },
    /// Axis-aligned rectangle given by opposite corners.
    Rectangle {
        bottom_left: (f64, f64),
        top_right: (f64, f64),
    },
}

impl Contour {
    pub fn circle(center: Complex64, radius: f64) -> Self {
        assert!(radius > 0.0, "circle radius must be positive");
        Contour::Circle {
            center: (center.re, center.im),
            radius,
        }
    }

    pub fn ellipse(center: Complex64, semi_major_x: f64, semi_minor_y: f64) -> Self {
        assert!(
            semi_major_x > 0.0 && semi_minor_y > 0.0,
            "ellipse semi-axes must be positive"
        );
        Contour::Ellipse {
            center: (center.re, center.im),
            semi_major_x,
            semi_minor_y,
        }
    }

    pub fn rectangle(bottom_left: Complex64, top_right: Complex64) -> Self {
        assert!(
            bottom_left.re < top_right.re && bottom_left.im < top_right.im,
            "rectangle corners must satisfy Re(bl) < Re(tr) and Im(bl) < Im(tr)"
        );
        Contour::Rectangle {
            bottom_left: (bottom_left.re, bottom_left.im),
            top_right: (top_right.re, top_right.im),
        }
    }

    pub fn center(&self) -> Complex64 {
        match self {
            Contour::Circle { center, .. } | Contour::Ellipse { center, .. } => {
                Complex64::new(center.0, center.1)
            }
            Contour::Rectangle {
                bottom_left,
                top_right,
            } => Complex64::new(
                0.5 * (bottom_left.0 + top_right.0),
                0.5 * (bottom_left.1 + top_right.1),
            ),
        }
    }

    /// A length scale for the region: diameter for circles, major diameter
    /// for ellipses, diagonal for rectangles.
    pub fn diameter(&self) -> f64 {
        match self {
            Contour::Circle { radius, .. } => 2.0 * radius,
            Contour::Ellipse {
                semi_major_x,
                semi_minor_y,
                ..
            } => 2.0 * semi_major_x.max(*semi_minor_y),
            Contour::Rectangle {
                bottom_left,
                top_right,
            } => {
                let dx = top_right.0 - bottom_left.0;
                let dy = top_right.1 - bottom_left.1;
                dx.hypot(dy)
            }
        }
    }

    /// Strict interior test.
    pub fn is_inside(&self, z: Complex64) -> bool {
        match self {
            Contour::Circle { center, radius } => {
                (z - Complex64::new(center.0, center.1)).norm() < *radius
            }
            Contour::Ellipse {
                center,
                semi_major_x,
                semi_minor_y,
            } => {
                let dx = (z.re - center.0) / semi_major_x;
                let dy = (z.im - center.1) / semi_minor_y;
                dx * dx + dy * dy < 1.0
            }
            Contour::Rectangle {
                bottom_left,
                top_right,
            } => {
                z.re > bottom_left.0
                    && z.re < top_right.0
                    && z.im > bottom_left.1
                    && z.im < top_right.1
            }
        }
    }

    /// Distance from `z` to the contour curve. Exact for circles and
    /// rectangles; ellipses are sampled.
    pub fn distance_to_boundary(&self, z: Complex64) -> f64 {
        match self {
            Contour::Circle { center, radius } => {
                ((z - Complex64::new(center.0, center.1)).norm() - radius).abs()
            }
            Contour::Ellipse { .. } => self
                .sample_boundary(720)
                .iter()
                .map(|p| (z - p).norm())
                .fold(f64::INFINITY, f64::min),
            Contour::Rectangle {
                bottom_left,
                top_right,
            } => {
                let (x0, y0) = *bottom_left;
                let (x1, y1) = *top_right;
                if self.is_inside(z) {
                    (z.re - x0).min(x1 - z.re).min(z.im - y0).min(y1 - z.im)
                } else {
                    let dx = (x0 - z.re).max(0.0).max(z.re - x1);
                    let dy = (y0 - z.im).max(0.0).max(z.im - y1);
                    dx.hypot(dy)
                }
            }
        }
    }

    /// Evenly spread points along the curve, for plot data and for the
    /// sampled ellipse distance.
    pub fn sample_boundary(&self, k: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(k);
        match self {
            Contour::Circle { center, radius } => {
                let c = Complex64::new(center.0, center.1);
                for i in 0..k {
                    let t = TWO_PI * i as f64 / k as f64;
                    out.push(c + radius * Complex64::new(t.cos(), t.sin()));
                }
            }
            Contour::Ellipse {
                center,
                semi_major_x,
                semi_minor_y,
            } => {
                let c = Complex64::new(center.0, center.1);
                for i in 0..k {
                    let t = TWO_PI * i as f64 / k as f64;
                    out.push(c + Complex64::new(semi_major_x * t.cos(), semi_minor_y * t.sin()));
                }
            }
            Contour::Rectangle { .. } => {
                let corners = self.corners_ccw_from_top_left();
                let per_side = (k / 4).max(1);
                for s in 0..4 {
                    let a = corners[s];
                    let b = corners[(s + 1) % 4];
                    for i in 0..per_side {
                        let t = i as f64 / per_side as f64;
                        out.push(a + (b - a) * t);
                    }
                }
            }
        }
        out
    }

    /// Bounding box as (bottom-left, top-right).
    pub fn bounding_box(&self) -> (Complex64, Complex64) {
        match self {
            Contour::Circle { center, radius } => (
                Complex64::new(center.0 - radius, center.1 - radius),
                Complex64::new(center.0 + radius, center.1 + radius),
            ),
            Contour::Ellipse {
                center,
                semi_major_x,
                semi_minor_y,
            } => (
                Complex64::new(center.0 - semi_major_x, center.1 - semi_minor_y),
                Complex64::new(center.0 + semi_major_x, center.1 + semi_minor_y),
            ),
            Contour::Rectangle {
                bottom_left,
                top_right,
            } => (
                Complex64::new(bottom_left.0, bottom_left.1),
                Complex64::new(top_right.0, top_right.1),
            ),
        }
    }

    /// Corners in counterclockwise order starting at the top-left, the
    /// traversal convention for rectangle quadrature.
    fn corners_ccw_from_top_left(&self) -> [Complex64; 4] {
        match self {
            Contour::Rectangle {
                bottom_left,
                top_right,
            } => {
                let (x0, y0) = *bottom_left;
                let (x1, y1) = *top_right;
                [
                    Complex64::new(x0, y1), // top-left
                    Complex64::new(x0, y0), // bottom-left
                    Complex64::new(x1, y0), // bottom-right
                    Complex64::new(x1, y1), // top-right
                ]
            }
            _ => panic!("corners are only defined for rectangles"),
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial with the cosine initial guess.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            let step = p / d;
            z -= step;
            if step.abs() <= 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        let weight = 2.0 / ((1.0 - z * z) * d * d);
        x[i] = -z;
        w[i] = weight;
        x[n - 1 - i] = z;
        w[n - 1 - i] = weight;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature discretization of the Cauchy integral on a contour.
///
/// `nodes[k]` lie on the contour; `weights[k]` already contain the
/// `-1/(2 pi i)` prefactor and the parametrization derivative, so for a
/// function holomorphic inside, `sum_k weights[k] f(nodes[k]) / (z - nodes[k])`
/// reproduces `f(z)` in the interior.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    /// Human-readable description of the scheme (recorded in reports).
    pub scheme: String,
}

impl QuadratureRule {
    pub fn m(&self) -> usize {
        self.nodes.len()
    }
}

/// Build the `m`-node quadrature rule for a contour.
///
/// Circles and ellipses use a single Gauss-Legendre rule mapped onto the
/// angle parameter. Rectangles distribute nodes over the four sides
/// proportionally to side length (largest-remainder rounding, each side at
/// least one node), traversed counterclockwise from the top-left corner,
/// with a Gauss-Legendre rule per side.
pub fn quadrature_rule(contour: &Contour, m: usize) -> Result<QuadratureRule> {
    match contour {
        Contour::Circle { center, radius } => {
            if m < 2 {
                return Err(Error::InvalidNodeCount {
                    m,
                    shape: "circle",
                    min: 2,
                });
            }
            let c = Complex64::new(center.0, center.1);
            let (x, w) = gauss_legendre(m);
            let mut nodes = Vec::with_capacity(m);
            let mut weights = Vec::with_capacity(m);
            for k in 0..m {
                let t = std::f64::consts::PI * (x[k] + 1.0);
                let e = Complex64::new(t.cos(), t.sin());
                nodes.push(c + radius * e);
                // -1/(2 pi i) * (pi w) * (i r e^{it}) = -(w r / 2) e^{it}
                weights.push(-0.5 * w[k] * radius * e);
            }
            Ok(QuadratureRule {
                nodes,
                weights,
                scheme: format!("gauss-legendre-circle(m={m})"),
            })
        }
        Contour::Ellipse {
            center,
            semi_major_x,
            semi_minor_y,
        } => {
            if m < 2 {
                return Err(Error::InvalidNodeCount {
                    m,
                    shape: "ellipse",
                    min: 2,
                });
            }
            let c = Complex64::new(center.0, center.1);
            let (x, w) = gauss_legendre(m);
            let mut nodes = Vec::with_capacity(m);
            let mut weights = Vec::with_capacity(m);
            let minus_inv_2pi_i = -Complex64::new(0.0, TWO_PI).inv();
            for k in 0..m {
                let t = std::f64::consts::PI * (x[k] + 1.0);
                nodes.push(c + Complex64::new(semi_major_x * t.cos(), semi_minor_y * t.sin()));
                let dphi = Complex64::new(-semi_major_x * t.sin(), semi_minor_y * t.cos());
                weights.push(minus_inv_2pi_i * (std::f64::consts::PI * w[k]) * dphi);
            }
            Ok(QuadratureRule {
                nodes,
                weights,
                scheme: format!("gauss-legendre-ellipse(m={m})"),
            })
        }
        Contour::Rectangle { .. } => {
            if m < 4 {
                return Err(Error::InvalidNodeCount {
                    m,
                    shape: "rectangle",
                    min: 4,
                });
            }
            let corners = contour.corners_ccw_from_top_left();
            let lengths: Vec<f64> = (0..4)
                .map(|s| (corners[(s + 1) % 4] - corners[s]).norm())
                .collect();
            let counts = apportion(m, &lengths);
            let minus_inv_2pi_i = -Complex64::new(0.0, TWO_PI).inv();
            let mut nodes = Vec::with_capacity(m);
            let mut weights = Vec::with_capacity(m);
            for s in 0..4 {
                let a = corners[s];
                let b = corners[(s + 1) % 4];
                let (x, w) = gauss_legendre(counts[s]);
                let half = (b - a) * 0.5;
                for k in 0..counts[s] {
                    nodes.push(a + half * (x[k] + 1.0));
                    weights.push(minus_inv_2pi_i * w[k] * half);
                }
            }
            Ok(QuadratureRule {
                nodes,
                weights,
                scheme: format!(
                    "gauss-legendre-rectangle(m={m}, sides=[{},{},{},{}])",
                    counts[0], counts[1], counts[2], counts[3]
                ),
            })
        }
    }
}

/// Largest-remainder apportionment of `m` nodes over side lengths, with a
/// minimum of one node per side. Remainder ties go to the longer side,
/// then to the earlier side in traversal order.
pub fn apportion(m: usize, lengths: &[f64]) -> Vec<usize> {
    let total: f64 = lengths.iter().sum();
    let quotas: Vec<f64> = lengths.iter().map(|l| m as f64 * l / total).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = quotas[i] - quotas[i].floor();
        let rj = quotas[j] - quotas[j].floor();
        rj.partial_cmp(&ri)
            .unwrap()
            .then(lengths[j].partial_cmp(&lengths[i]).unwrap())
            .then(i.cmp(&j))
    });
    for k in 0..m.saturating_sub(assigned) {
        counts[order[k % order.len()]] += 1;
    }
    // Enforce the one-node minimum by stealing from the largest count.
    while let Some(zero) = counts.iter().position(|&c| c == 0) {
        let (imax, _) = counts
            .iter()
            .enumerate()
            .max_by_key(|(_, &c)| c)
            .expect("nonempty");
        counts[imax] -= 1;
        counts[zero] += 1;
    }
    counts
}

/// Rational approximation with one shared pole set for all functions:
/// `r_j(z) = sum_i coeffs[i][j] / (z - poles[i])`.
#[derive(Clone, Debug)]
pub struct RationalApprox {
    pub poles: Vec<Complex64>,
    /// Coefficient table, `m x p` (pole-major).
    pub coeffs: Vec<Vec<Complex64>>,
    pub scheme: String,
}

impl RationalApprox {
    pub fn m(&self) -> usize {
        self.poles.len()
    }

    pub fn p(&self) -> usize {
        self.coeffs.first().map_or(0, |row| row.len())
    }

    /// Evaluate `r_j(z)`. The caller is responsible for staying off poles.
    pub fn eval(&self, j: usize, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (pole, row) in self.poles.iter().zip(&self.coeffs) {
            acc += row[j] / (z - pole);
        }
        acc
    }

    pub fn min_pole_distance(&self, z: Complex64) -> f64 {
        self.poles
            .iter()
            .map(|p| (z - p).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Build the shared-pole rational approximation of `p` functions from a
/// quadrature rule: `alpha_kj = w_k f_j(sigma_k)`.
///
/// Fails with `EvaluationFailure` when some `f_j(sigma_k)` is non-finite,
/// which signals a pole of `f_j` on the contour; the caller must move the
/// contour.
pub fn build_rational_approx(
    rule: &QuadratureRule,
    funcs: &[&dyn Fn(Complex64) -> Complex64],
) -> Result<RationalApprox> {
    let m = rule.m();
    let p = funcs.len();
    let mut coeffs = Vec::with_capacity(m);
    for k in 0..m {
        let sigma = rule.nodes[k];
        let mut row = Vec::with_capacity(p);
        for (j, f) in funcs.iter().enumerate() {
            let v = f(sigma);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::EvaluationFailure { term: j, z: sigma });
            }
            row.push(rule.weights[k] * v);
        }
        coeffs.push(row);
    }
    debug_assert!(
        (0..m).all(|i| (0..i).all(|k| rule.nodes[i] != rule.nodes[k])),
        "quadrature nodes must be pairwise distinct"
    );
    Ok(RationalApprox {
        poles: rule.nodes.clone(),
        coeffs,
        scheme: rule.scheme.clone(),
    })
}

/// Sup-norm error `max |f(z) - r_term(z)|` over a tensor grid of the
/// bounding box of `inner_region`, restricted to its interior.
///
/// The inner region must be strictly inside the pole contour; a grid point
/// within 1e-12 of a pole raises `RegionNotInterior`.
pub fn approx_error(
    ra: &RationalApprox,
    term: usize,
    f: &(dyn Fn(Complex64) -> Complex64 + Sync),
    inner_region: &Contour,
    grid_density: usize,
) -> Result<f64> {
    assert!(grid_density >= 2);
    let (bl, tr) = inner_region.bounding_box();
    let rows: Vec<usize> = (0..grid_density).collect();
    let result: Result<Vec<f64>> = rows
        .par_iter()
        .map(|&iy| {
            let y = bl.im + (tr.im - bl.im) * iy as f64 / (grid_density - 1) as f64;
            let mut worst = 0.0f64;
            for ix in 0..grid_density {
                let x = bl.re + (tr.re - bl.re) * ix as f64 / (grid_density - 1) as f64;
                let z = Complex64::new(x, y);
                if !inner_region.is_inside(z) {
                    continue;
                }
                if ra.min_pole_distance(z) <= 1e-12 {
                    return Err(Error::RegionNotInterior { z });
                }
                let err = (f(z) - ra.eval(term, z)).norm();
                if err > worst {
                    worst = err;
                }
            }
            Ok(worst)
        })
        .collect();
    Ok(result?.into_iter().fold(0.0, f64::max))
}

/// Default grid density for [`approx_error`].
pub const DEFAULT_GRID_DENSITY: usize = 200;

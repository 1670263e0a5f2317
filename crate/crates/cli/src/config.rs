//! Run configuration: one JSON file describes problem, contour,
//! approximation and solver; command-specific sections are optional.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use ratnlevp::contour::Contour;
use ratnlevp::gallery;
use ratnlevp::solvers::{Method, SolveConfig};
use ratnlevp::SplitProblem;

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub problem: ProblemSpec,
    pub contour: Contour,
    #[serde(default)]
    pub approximation: ApproxSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub halo: HaloSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum ProblemSpec {
    Gallery {
        gallery: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b0: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tau: Option<f64>,
    },
    File {
        path: PathBuf,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxSpec {
    /// Quadrature node count for the rational approximation.
    #[serde(default = "default_m")]
    pub m: usize,
    /// Range `[start, end, step]` for the approx-error sweep.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_range: Option<[usize; 3]>,
    /// Inner region scale relative to the contour (approx-error command).
    #[serde(default = "default_inner_scale")]
    pub inner_scale: f64,
    #[serde(default = "default_grid_density")]
    pub grid_density: usize,
}

fn default_m() -> usize {
    50
}
fn default_inner_scale() -> f64 {
    0.5
}
fn default_grid_density() -> usize {
    ratnlevp::contour::DEFAULT_GRID_DENSITY
}

impl Default for ApproxSpec {
    fn default() -> Self {
        Self {
            m: default_m(),
            m_range: None,
            inner_scale: default_inner_scale(),
            grid_density: default_grid_density(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CliMethod {
    FullArnoldi,
    FullSubspace,
    ReducedSubspace,
    DenseLinearization,
    Beyn,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default = "default_method")]
    pub method: CliMethod,
    /// Shift as `[re, im]`; defaults to the contour center.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<(f64, f64)>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<usize>,
    #[serde(default = "default_q")]
    pub q: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_outer")]
    pub max_outer: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Quadrature nodes for the contour-integral baseline.
    #[serde(default = "default_quad_nodes")]
    pub quad_nodes: usize,
    /// Probe columns for the baseline (defaults to k + 5).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
}

fn default_method() -> CliMethod {
    CliMethod::FullArnoldi
}
fn default_k() -> usize {
    5
}
fn default_q() -> usize {
    5
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_outer() -> usize {
    60
}
fn default_seed() -> u64 {
    7
}
fn default_quad_nodes() -> usize {
    64
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            method: default_method(),
            sigma: None,
            k: default_k(),
            nu: None,
            q: default_q(),
            tol: default_tol(),
            max_outer: default_max_outer(),
            seed: default_seed(),
            quad_nodes: default_quad_nodes(),
            probes: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct HaloSpec {
    /// Reference spectrum source: "auto" picks the polynomial
    /// linearization when every term is polynomial and the contour
    /// integral baseline otherwise; "none" classifies without references.
    #[serde(default = "default_oracle")]
    pub oracle: Option<String>,
    #[serde(default = "default_tol_match")]
    pub tol_match: f64,
}

fn default_oracle() -> Option<String> {
    Some("auto".to_string())
}
fn default_tol_match() -> f64 {
    1e-3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: Config = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.solver.k == 0 {
            return Err(CliError::Config("solver.k must be at least 1".into()));
        }
        if self.solver.q == 0 {
            return Err(CliError::Config("solver.q must be at least 1".into()));
        }
        if self.solver.tol <= 0.0 || self.solver.tol.is_nan() {
            return Err(CliError::Config("solver.tol must be positive".into()));
        }
        if let Some(nu) = self.solver.nu {
            if nu < self.solver.k {
                return Err(CliError::Config(
                    "solver.nu must be at least solver.k".into(),
                ));
            }
        }
        if let Some([start, end, step]) = self.approximation.m_range {
            if step == 0 || start > end {
                return Err(CliError::Config(
                    "approximation.m_range must be [start, end, step] with step > 0 and start <= end"
                        .into(),
                ));
            }
        }
        if self.approximation.m < 2 {
            return Err(CliError::Config(
                "approximation.m must be at least 2".into(),
            ));
        }
        let scale = self.approximation.inner_scale;
        if scale <= 0.0 || scale >= 1.0 || scale.is_nan() {
            return Err(CliError::Config(
                "approximation.inner_scale must lie strictly between 0 and 1".into(),
            ));
        }
        match &self.contour {
            Contour::Circle { radius, .. } if !(radius > &0.0) => {
                return Err(CliError::Config("contour.radius must be positive".into()))
            }
            Contour::Ellipse {
                semi_major_x,
                semi_minor_y,
                ..
            } if !(semi_major_x > &0.0 && semi_minor_y > &0.0) => {
                return Err(CliError::Config(
                    "contour semi-axes must be positive".into(),
                ))
            }
            Contour::Rectangle {
                bottom_left,
                top_right,
            } if !(bottom_left.0 < top_right.0 && bottom_left.1 < top_right.1) => {
                return Err(CliError::Config(
                    "contour.bottom_left must lie strictly below-left of contour.top_right".into(),
                ))
            }
            _ => {}
        }
        Ok(())
    }

    pub fn build_problem(&self) -> Result<SplitProblem, CliError> {
        match &self.problem {
            ProblemSpec::Gallery {
                gallery: name,
                n,
                b0,
                tau,
            } => match name.as_str() {
                "delay" => Ok(gallery::make_delay(tau.unwrap_or(1.0))),
                "fem" | "fem-string" => Ok(gallery::make_fem_string(n.unwrap_or(100))),
                "hadeler" => Ok(gallery::make_hadeler(n.unwrap_or(200), b0.unwrap_or(100.0))),
                "quadratic" | "quadratic-halo" => {
                    Ok(gallery::make_quadratic_halo(n.unwrap_or(4)))
                }
                other => Err(CliError::Config(format!(
                    "problem.gallery: unknown problem {other:?}; known: delay, fem, hadeler, quadratic"
                ))),
            },
            ProblemSpec::File { path } => Ok(gallery::load_problem(path)?),
        }
    }

    pub fn solve_config(&self, seed_override: Option<u64>) -> SolveConfig {
        SolveConfig {
            sigma: self.solver.sigma,
            k: self.solver.k,
            nu: self.solver.nu,
            q: self.solver.q,
            max_outer: self.solver.max_outer,
            tol: self.solver.tol,
            seed: seed_override.unwrap_or(self.solver.seed),
        }
    }

    pub fn core_method(&self) -> Option<Method> {
        match self.solver.method {
            CliMethod::FullArnoldi => Some(Method::FullArnoldi),
            CliMethod::FullSubspace => Some(Method::FullSubspace),
            CliMethod::ReducedSubspace => Some(Method::ReducedSubspace),
            CliMethod::DenseLinearization => Some(Method::DenseLinearization),
            CliMethod::Beyn => None,
        }
    }

    /// Inner region scaled about the contour center, for error sweeps.
    pub fn inner_region(&self) -> Contour {
        scale_about_center(&self.contour, self.approximation.inner_scale)
    }
}

pub fn scale_about_center(contour: &Contour, scale: f64) -> Contour {
    let center = contour.center();
    match contour {
        Contour::Circle { radius, .. } => Contour::circle(center, radius * scale),
        Contour::Ellipse {
            semi_major_x,
            semi_minor_y,
            ..
        } => Contour::ellipse(center, semi_major_x * scale, semi_minor_y * scale),
        Contour::Rectangle {
            bottom_left,
            top_right,
        } => {
            let bl = Complex64::new(bottom_left.0, bottom_left.1);
            let tr = Complex64::new(top_right.0, top_right.1);
            Contour::rectangle(
                center + (bl - center) * scale,
                center + (tr - center) * scale,
            )
        }
    }
}

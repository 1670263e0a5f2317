use std::path::Path;

use num_complex::Complex64;

use ratnlevp::analysis::{classify_halo, polynomial_oracle};
use ratnlevp::baseline::{beyn_solve, BeynConfig};
use ratnlevp::contour::{build_rational_approx, quadrature_rule, RationalApprox};
use ratnlevp::gallery;
use ratnlevp::nlevp::build_surrogate;
use ratnlevp::solvers::{solve as dispatch_solve, EigenReport};
use ratnlevp::{SplitProblem, Surrogate};

use crate::config::{CliMethod, Config};
use crate::output::{eigenvalue_csv, report_json, write_atomic};
use crate::CliError;

fn out_dir<'a>(config: &'a Config, cli_out: Option<&'a Path>) -> &'a Path {
    cli_out
        .or(config.output.dir.as_deref())
        .unwrap_or_else(|| Path::new("."))
}

struct Built {
    prob: SplitProblem,
    ra: RationalApprox,
    surrogate: Surrogate,
}

fn build(config: &Config) -> Result<Built, CliError> {
    let prob = config.build_problem()?;
    let rule = quadrature_rule(&config.contour, config.approximation.m)?;
    let evals: Vec<_> = prob.terms().iter().map(|(_, f)| f.clone()).collect();
    let funcs: Vec<Box<dyn Fn(Complex64) -> Complex64>> = evals
        .iter()
        .map(|f| {
            let f = f.clone();
            Box::new(move |z| f.eval(z)) as Box<dyn Fn(Complex64) -> Complex64>
        })
        .collect();
    let refs: Vec<&dyn Fn(Complex64) -> Complex64> = funcs.iter().map(|b| b.as_ref()).collect();
    let ra = build_rational_approx(&rule, &refs)?;
    let surrogate = build_surrogate(&prob, &ra)?;
    Ok(Built {
        prob,
        ra,
        surrogate,
    })
}

fn run_solver(config: &Config, seed: Option<u64>) -> Result<(Built, EigenReport), CliError> {
    let built = build(config)?;
    let cfg = config.solve_config(seed);
    let report = match config.core_method() {
        Some(method) => dispatch_solve(
            method,
            &built.prob,
            &built.surrogate,
            &built.ra,
            &cfg,
            &config.contour,
        )?,
        None => {
            let mut bc = BeynConfig::new(config.solver.quad_nodes, config.solver.k);
            if let Some(probes) = config.solver.probes {
                bc.probes = probes;
            }
            bc.seed = seed.unwrap_or(config.solver.seed);
            beyn_solve(&built.prob, &config.contour, &bc)?
        }
    };
    Ok((built, report))
}

pub fn approx_error(config_path: &Path, cli_out: Option<&Path>) -> Result<(), CliError> {
    let config = Config::load(config_path)?;
    let ms: Vec<usize> = match config.approximation.m_range {
        Some([start, end, step]) => (start..=end).step_by(step).collect(),
        None => vec![config.approximation.m],
    };
    if ms.is_empty() {
        return Err(CliError::Config(
            "approximation.m_range produced no node counts".into(),
        ));
    }
    let prob = config.build_problem()?;
    let inner = config.inner_region();
    let mut csv = String::from("m");
    for j in 0..prob.p() {
        csv.push_str(&format!(",e_{}", j + 1));
    }
    csv.push('\n');
    for &m in &ms {
        let rule = quadrature_rule(&config.contour, m)?;
        let evals: Vec<_> = prob.terms().iter().map(|(_, f)| f.clone()).collect();
        let funcs: Vec<Box<dyn Fn(Complex64) -> Complex64 + Sync>> = evals
            .iter()
            .map(|f| {
                let f = f.clone();
                Box::new(move |z| f.eval(z)) as Box<dyn Fn(Complex64) -> Complex64 + Sync>
            })
            .collect();
        let refs: Vec<&dyn Fn(Complex64) -> Complex64> = funcs
            .iter()
            .map(|b| b.as_ref() as &dyn Fn(Complex64) -> Complex64)
            .collect();
        let ra = build_rational_approx(&rule, &refs)?;
        csv.push_str(&m.to_string());
        for (j, f) in funcs.iter().enumerate() {
            let e = ratnlevp::contour::approx_error(
                &ra,
                j,
                f.as_ref(),
                &inner,
                config.approximation.grid_density,
            )?;
            csv.push_str(&format!(",{e:.17e}"));
        }
        csv.push('\n');
    }
    let dir = out_dir(&config, cli_out);
    write_atomic(&dir.join("approx_error.csv"), csv.as_bytes())?;
    println!("wrote {}", dir.join("approx_error.csv").display());
    Ok(())
}

pub fn solve_cmd(
    config_path: &Path,
    cli_out: Option<&Path>,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let config = Config::load(config_path)?;
    let (built, report) = run_solver(&config, seed)?;
    // Best-effort halo labels for the CSV; classification never fails.
    let reference = polynomial_oracle(&built.prob);
    let labels = classify_halo(
        &report,
        &built.surrogate,
        &config.contour,
        config.halo.tol_match,
        reference.as_deref(),
    );
    let dir = out_dir(&config, cli_out);
    let json = serde_json::to_vec_pretty(&report_json(&report))
        .map_err(|e| CliError::Io(e.to_string()))?;
    write_atomic(&dir.join("report.json"), &json)?;
    write_atomic(
        &dir.join("eigenvalues.csv"),
        eigenvalue_csv(&report, Some(&labels)).as_bytes(),
    )?;
    println!(
        "{}: {} accepted pairs ({} inside), wrote {} and {}",
        report.meta.solver,
        report.pairs.len(),
        report.interior().len(),
        dir.join("report.json").display(),
        dir.join("eigenvalues.csv").display()
    );
    Ok(())
}

pub fn halo(config_path: &Path, cli_out: Option<&Path>, seed: Option<u64>) -> Result<(), CliError> {
    let mut config = Config::load(config_path)?;
    // The halo picture needs the whole surrogate spectrum.
    if config.core_method().is_none() {
        return Err(CliError::Config(
            "halo requires a linearization-based solver, not the baseline".into(),
        ));
    }
    if matches!(
        config.solver.method,
        CliMethod::FullArnoldi | CliMethod::FullSubspace | CliMethod::ReducedSubspace
    ) && config.approximation.m * 64 <= 4096
    {
        // Small problems: switch to the dense solve so every eigenvalue
        // (including the halo) appears in the picture.
        config.solver.method = CliMethod::DenseLinearization;
    }
    let (built, report) = run_solver(&config, seed)?;

    let oracle_mode = config.halo.oracle.as_deref().unwrap_or("auto");
    let reference: Option<Vec<Complex64>> = match oracle_mode {
        "none" => None,
        "auto" => match polynomial_oracle(&built.prob) {
            Some(r) => Some(r),
            None => {
                let mut bc = BeynConfig::new(config.solver.quad_nodes, config.solver.k);
                bc.seed = config.solver.seed;
                match beyn_solve(&built.prob, &config.contour, &bc) {
                    Ok(rep) => Some(rep.pairs.iter().map(|p| p.lambda).collect()),
                    Err(_) => None,
                }
            }
        },
        other => {
            return Err(CliError::Config(format!(
                "halo.oracle must be \"auto\" or \"none\", got {other:?}"
            )))
        }
    };
    let labels = classify_halo(
        &report,
        &built.surrogate,
        &config.contour,
        config.halo.tol_match,
        reference.as_deref(),
    );

    let mut csv = String::new();
    csv.push_str(&format!(
        "# halo classification; reference: {}\n",
        if reference.is_some() {
            oracle_mode
        } else {
            "none"
        }
    ));
    csv.push_str("kind,re,im,label,low_confidence\n");
    for l in &labels {
        csv.push_str(&format!(
            "surrogate,{:.17e},{:.17e},{:?},{}\n",
            l.lambda.re, l.lambda.im, l.label, l.low_confidence
        ));
    }
    if let Some(reference) = &reference {
        for t in reference {
            csv.push_str(&format!("reference,{:.17e},{:.17e},,\n", t.re, t.im));
        }
    }
    if let Ok(pencil) = ratnlevp::linalg::dense_geig(built.prob.b0(), built.prob.a0()) {
        for (v, finite) in pencil.values.iter().zip(&pencil.finite) {
            if *finite {
                csv.push_str(&format!("pencil,{:.17e},{:.17e},,\n", v.re, v.im));
            }
        }
    }
    for z in config.contour.sample_boundary(256) {
        csv.push_str(&format!("contour,{:.17e},{:.17e},,\n", z.re, z.im));
    }
    let dir = out_dir(&config, cli_out);
    write_atomic(&dir.join("halo.csv"), csv.as_bytes())?;
    println!("wrote {}", dir.join("halo.csv").display());
    Ok(())
}

pub fn compare(
    path_a: &Path,
    path_b: &Path,
    cli_out: Option<&Path>,
    seed: Option<u64>,
) -> Result<(), CliError> {
    let config_a = Config::load(path_a)?;
    let config_b = Config::load(path_b)?;
    if config_a.problem != config_b.problem {
        return Err(CliError::IncompatibleRuns(
            "the two runs configure different problems".into(),
        ));
    }
    if config_a.contour != config_b.contour {
        return Err(CliError::IncompatibleRuns(
            "the two runs configure different contours".into(),
        ));
    }
    let (_, report_a) = run_solver(&config_a, seed)?;
    let (_, report_b) = run_solver(&config_b, seed)?;
    let mut a: Vec<Complex64> = report_a.interior();
    let mut b: Vec<Complex64> = report_b.interior();

    // Greedy nearest-neighbor matching.
    let mut matches: Vec<(Complex64, Complex64, f64)> = Vec::new();
    while !a.is_empty() && !b.is_empty() {
        let mut best = (0usize, 0usize, f64::INFINITY);
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let d = (x - y).norm();
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        matches.push((a.remove(best.0), b.remove(best.1), best.2));
    }
    let max_distance = matches.iter().map(|m| m.2).fold(0.0f64, f64::max);
    let mean_distance = if matches.is_empty() {
        0.0
    } else {
        matches.iter().map(|m| m.2).sum::<f64>() / matches.len() as f64
    };
    let diff = serde_json::json!({
        "method_a": report_a.meta.solver,
        "method_b": report_b.meta.solver,
        "matched": matches.iter().map(|(x, y, d)| serde_json::json!({
            "a": [x.re, x.im], "b": [y.re, y.im], "distance": d,
        })).collect::<Vec<_>>(),
        "unmatched_a": a.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "unmatched_b": b.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "max_distance": max_distance,
        "mean_distance": mean_distance,
    });
    let text = serde_json::to_string_pretty(&diff).map_err(|e| CliError::Io(e.to_string()))?;
    match cli_out.or(config_a.output.dir.as_deref()) {
        Some(dir) => {
            write_atomic(&dir.join("compare.json"), text.as_bytes())?;
            println!("wrote {}", dir.join("compare.json").display());
        }
        None => println!("{text}"),
    }
    Ok(())
}

pub fn gallery_list() -> Result<(), CliError> {
    println!("built-in gallery experiments:");
    for name in gallery::experiment_names() {
        let exp = gallery::experiment(name).expect("listed experiment exists");
        println!(
            "  {name:<18} n = {:<4} p = {} m = {:<3} contour = {:?}, {} eigenvalue(s) expected inside",
            exp.problem.dim(),
            exp.problem.p(),
            exp.m,
            exp.contour,
            exp.expected_inside,
        );
    }
    println!("\nfile problems: a directory with manifest.json and one matrix file per block");
    println!("(first line \"rows cols\", then rows*cols lines of \"re im\")");
    Ok(())
}

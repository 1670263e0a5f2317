//! Serialized report formats and atomic file writing (no partial files on
//! error: write to a temporary sibling, then rename).

use std::fs;
use std::path::Path;

use serde::Serialize;

use ratnlevp::analysis::HaloClassification;
use ratnlevp::solvers::{EigenReport, ReportMeta};

use crate::CliError;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("out")
    ));
    fs::write(&tmp, bytes).map_err(|e| CliError::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

#[derive(Serialize)]
pub struct JsonReport<'a> {
    pub metadata: &'a ReportMeta,
    pub iterations: usize,
    pub pole_artifacts: Vec<[f64; 2]>,
    pub pairs: Vec<JsonPair>,
}

#[derive(Serialize)]
pub struct JsonPair {
    pub lambda: [f64; 2],
    pub residual_t: Option<f64>,
    pub residual_surrogate: Option<f64>,
    pub inside: bool,
    pub pole_flag: bool,
    pub cond: Option<f64>,
    pub eigenvector: Vec<[f64; 2]>,
}

pub fn report_json(report: &EigenReport) -> JsonReport<'_> {
    JsonReport {
        metadata: &report.meta,
        iterations: report.iterations,
        pole_artifacts: report.pole_artifacts.iter().map(|z| [z.re, z.im]).collect(),
        pairs: report
            .pairs
            .iter()
            .map(|p| JsonPair {
                lambda: [p.lambda.re, p.lambda.im],
                residual_t: p.residual_t,
                residual_surrogate: p.residual_surrogate,
                inside: p.inside,
                pole_flag: p.pole_flag,
                cond: p.cond,
                eigenvector: p.u.as_slice().iter().map(|z| [z.re, z.im]).collect(),
            })
            .collect(),
    }
}

/// CSV rows `re,im,residual_t,inside,label` for the accepted pairs.
pub fn eigenvalue_csv(report: &EigenReport, labels: Option<&[HaloClassification]>) -> String {
    let mut out = String::from("re,im,residual_t,inside,label\n");
    for (i, p) in report.pairs.iter().enumerate() {
        let label = labels
            .and_then(|l| l.get(i))
            .map(|l| format!("{:?}", l.label))
            .unwrap_or_else(|| "unclassified".to_string());
        let res = p
            .residual_t
            .map(|r| format!("{r:.17e}"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{:.17e},{:.17e},{},{},{}\n",
            p.lambda.re, p.lambda.im, res, p.inside, label
        ));
    }
    out
}

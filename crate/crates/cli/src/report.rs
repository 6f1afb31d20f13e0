//! Report serialization: a line-oriented CSV per analysis plus a structured
//! JSON metadata sidecar, and a human-readable summary table.
//!
//! All numeric formatting is fixed so identical runs produce byte-identical
//! files. Wall times are printed to the console, never written into report
//! files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use gsa_core::sobol::SensitivityReport;

use crate::config::{MethodId, ModelChoice, RunConfig};
use crate::CliError;

/// Schema version stamped into every metadata sidecar.
pub const SCHEMA_VERSION: u32 = 1;

pub fn format_float(x: f64) -> String {
    format!("{x:.10e}")
}

/// The fixed CSV header of every per-analysis indices table.
pub const INDICES_HEADER: &str = "factor,main,main_lo,main_hi,total,total_lo,total_hi";

/// File-name stem for one (model, method, rho) analysis.
pub fn report_stem(model: ModelChoice, method: MethodId, rho: Option<f64>) -> String {
    match rho {
        Some(r) => format!("{}_{}_rho{:+.2}", model.as_str(), method.as_str(), r),
        None => format!("{}_{}", model.as_str(), method.as_str()),
    }
}

pub fn indices_csv(report: &SensitivityReport<f64>) -> String {
    let mut out = String::new();
    out.push_str(INDICES_HEADER);
    out.push('\n');
    for f in &report.factors {
        let ci = |v: Option<(f64, f64)>| match v {
            Some((lo, hi)) => (format_float(lo), format_float(hi)),
            None => (String::new(), String::new()),
        };
        let (main_lo, main_hi) = ci(f.main_ci);
        let (total_lo, total_hi) = ci(f.total_ci);
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            f.name,
            format_float(f.main),
            main_lo,
            main_hi,
            format_float(f.total),
            total_lo,
            total_hi
        )
        .unwrap();
    }
    out
}

pub fn convergence_csv(report: &SensitivityReport<f64>) -> Option<String> {
    let ladder = report.convergence.as_ref()?;
    let mut out = String::from("n,factor,main,total\n");
    for row in ladder {
        for (i, f) in report.factors.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{}",
                row.n,
                f.name,
                format_float(row.main[i]),
                format_float(row.total[i])
            )
            .unwrap();
        }
    }
    Some(out)
}

/// Cardiac-output assumption surfaced in PBPK run metadata.
#[derive(Debug, Clone, Serialize)]
pub struct CoAssumption {
    pub co_mean_male_l_min: f64,
    pub co_mean_female_l_min: f64,
    pub note: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Estimators {
    pub main: &'static str,
    pub total: &'static str,
}

/// JSON metadata sidecar for one analysis.
#[derive(Debug, Clone, Serialize)]
pub struct ReportMeta {
    pub schema_version: u32,
    pub model: String,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    pub n: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bootstrap: Option<usize>,
    pub evaluations: usize,
    pub output_variance: f64,
    pub factors: Vec<String>,
    pub estimators: Estimators,
    pub sampling: String,
    pub files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assumptions: Option<CoAssumption>,
}

pub fn estimators_for(method: MethodId) -> Estimators {
    match method {
        MethodId::Kucherenko => Estimators {
            main: "conditional double-loop-free product estimator",
            total: "jansen on conditional own-coordinate resample",
        },
        _ => Estimators { main: "homma-saltelli", total: "jansen" },
    }
}

pub fn co_assumption(config: &RunConfig) -> Option<CoAssumption> {
    matches!(config.model, ModelChoice::PbpkMdz).then(|| CoAssumption {
        co_mean_male_l_min: config.pbpk.co_mean_male_l_min,
        co_mean_female_l_min: config.pbpk.co_mean_female_l_min,
        note: "mean cardiac output is not part of the published parameter tables; \
               configurable default",
    })
}

/// Writes the indices CSV, optional convergence CSV, and metadata JSON.
/// Returns the file paths written.
pub fn write_analysis(
    dir: &Path,
    config: &RunConfig,
    method: MethodId,
    report: &SensitivityReport<f64>,
) -> Result<Vec<PathBuf>, CliError> {
    let rho = report.rho;
    let stem = report_stem(config.model, method, rho);
    let mut written = Vec::new();
    let mut files = vec![format!("{stem}.csv")];

    let csv_path = dir.join(format!("{stem}.csv"));
    fs::write(&csv_path, indices_csv(report))?;
    written.push(csv_path);

    if let Some(convergence) = convergence_csv(report) {
        let path = dir.join(format!("{stem}_convergence.csv"));
        fs::write(&path, convergence)?;
        files.push(format!("{stem}_convergence.csv"));
        written.push(path);
    }

    let meta = ReportMeta {
        schema_version: SCHEMA_VERSION,
        model: config.model.as_str().to_string(),
        method: method.as_str().to_string(),
        rho,
        n: report.n,
        seed: report.seed,
        bootstrap: report.bootstrap,
        evaluations: report.evaluations,
        output_variance: report.output_variance,
        factors: report.factors.iter().map(|f| f.name.clone()).collect(),
        estimators: estimators_for(method),
        sampling: match config.sampling {
            gsa_core::sampling::SequenceKind::PseudoRandom => "pseudo".into(),
            gsa_core::sampling::SequenceKind::Halton => "halton".into(),
        },
        files,
        assumptions: co_assumption(config),
    };
    let meta_path = dir.join(format!("{stem}.meta.json"));
    fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")?;
    written.push(meta_path);
    Ok(written)
}

/// One block per method, factors as rows — the human-readable counterpart of
/// the result tables.
pub fn summary_block(title: &str, report: &SensitivityReport<f64>) -> String {
    let mut out = String::new();
    writeln!(out, "{title}").unwrap();
    writeln!(out, "{}", "-".repeat(title.len())).unwrap();
    writeln!(
        out,
        "{:<16} {:>24} {:>24}",
        "factor", "main (2.5%, 97.5%)", "total (2.5%, 97.5%)"
    )
    .unwrap();
    for f in &report.factors {
        let cell = |v: f64, ci: Option<(f64, f64)>| match ci {
            Some((lo, hi)) => format!("{v:.3} ({lo:.3}, {hi:.3})"),
            None => format!("{v:.3}"),
        };
        writeln!(
            out,
            "{:<16} {:>24} {:>24}",
            f.name,
            cell(f.main, f.main_ci),
            cell(f.total, f.total_ci)
        )
        .unwrap();
    }
    writeln!(
        out,
        "n = {}, evaluations = {}, seed = {}{}",
        report.n,
        report.evaluations,
        report.seed,
        match report.bootstrap {
            Some(b) => format!(", bootstrap = {b}"),
            None => ", uncertainty via convergence ladder".to_string(),
        }
    )
    .unwrap();
    out.push('\n');
    out
}

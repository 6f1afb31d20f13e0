//! Method dispatch for `run` and `sweep`.
//!
//! Stream allocation within one seed, fixed so methods never share draws:
//! sobol_independent uses substreams {0, 1}, sobol_grouped {2, 3},
//! kucherenko {4, 5}, latent {6, 7}, population simulation {10}. Sweeps reuse
//! the same streams for every rho (common random numbers), which keeps the
//! index-vs-rho curves smooth.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use gsa_core::algebraic::{latent_lift, AlgebraicModel};
use gsa_core::kucherenko::{estimate_kucherenko, GaussianJoint, KucherenkoSettings};
use gsa_core::pbpk::{PbpkAucModel, PbpkGsaMode, PopulationConfig, SimulationSettings};
use gsa_core::sobol::{estimate_grouped_pair, run_independent, SensitivityReport, SobolSettings};
use gsa_core::RandomStream;

use crate::config::{pbpk_solver, MethodId, ModelChoice, RunConfig};
use crate::report::{summary_block, write_analysis};
use crate::CliError;

const STREAM_SOBOL_INDEPENDENT: u64 = 0;
const STREAM_SOBOL_GROUPED: u64 = 2;
const STREAM_KUCHERENKO: u64 = 4;
const STREAM_LATENT: u64 = 6;

/// What happened across the individual analyses of one invocation.
#[derive(Debug, Default)]
pub struct RunOutcome {
    pub written: Vec<PathBuf>,
    pub completed: usize,
    pub errors: Vec<String>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> u8 {
        match (self.completed, self.errors.len()) {
            (_, 0) => 0,
            (0, _) => 3,
            _ => 4,
        }
    }
}

/// Builds the PBPK AUC model for the given mode and correlation.
pub fn pbpk_model(config: &RunConfig, mode: PbpkGsaMode, rho: f64) -> Result<PbpkAucModel<f64>, CliError> {
    let mut population = PopulationConfig::<f64>::reference();
    population.co_mean_l_min = [config.pbpk.co_mean_male_l_min, config.pbpk.co_mean_female_l_min];
    population.rho_cyp = rho;
    let sim = SimulationSettings {
        t_end_h: config.pbpk.t_end_h,
        rtol: config.pbpk.rtol,
        atol: config.pbpk.atol,
        method: pbpk_solver(&config.pbpk.solver)?,
        max_steps: 1_000_000,
    };
    let mut model = PbpkAucModel::new(mode);
    model.config = population;
    model.dose_mg = config.pbpk.dose_mg;
    model.sim = sim;
    Ok(model)
}

fn sobol_settings(config: &RunConfig, parallel: bool) -> SobolSettings {
    SobolSettings { bootstrap: config.bootstrap, parallel, sequence: config.sampling }
}

fn convergence_ladder(n: usize) -> Vec<usize> {
    let mut ladder: Vec<usize> = [n / 8, n / 4, n / 2, n]
        .iter()
        .copied()
        .filter(|&m| m >= 2)
        .collect();
    ladder.dedup();
    ladder
}

/// Runs one (method, rho) analysis and returns the finished report.
pub fn run_single(
    config: &RunConfig,
    method: MethodId,
    rho: f64,
) -> Result<SensitivityReport<f64>, CliError> {
    let seed = RandomStream::new(config.seed);
    // Model evaluations are only worth parallelizing when each one solves an
    // ODE system; the algebraic models are branch-free arithmetic.
    let parallel = matches!(config.model, ModelChoice::PbpkMdz) && config.threads != 1;
    let mut report = match (config.model, method) {
        (ModelChoice::Algebraic(id), MethodId::SobolIndependent) => run_independent(
            &AlgebraicModel::new(id),
            config.n,
            seed.substream(STREAM_SOBOL_INDEPENDENT),
            sobol_settings(config, parallel),
        )?,
        (ModelChoice::Algebraic(id), MethodId::SobolGrouped) => estimate_grouped_pair(
            &AlgebraicModel::new(id),
            rho,
            config.n,
            seed.substream(STREAM_SOBOL_GROUPED),
            sobol_settings(config, parallel),
        )?,
        (ModelChoice::Algebraic(id), MethodId::Kucherenko) => {
            let joint = GaussianJoint::with_pair(4, 0, 3, rho)?;
            estimate_kucherenko(
                &AlgebraicModel::new(id),
                &joint,
                config.n,
                seed.substream(STREAM_KUCHERENKO),
                &KucherenkoSettings { parallel, convergence_ladder: convergence_ladder(config.n) },
            )?
        }
        (ModelChoice::Algebraic(id), MethodId::Latent) => {
            let lifted = latent_lift(AlgebraicModel::new(id), rho)?;
            run_independent(
                &lifted,
                config.n,
                seed.substream(STREAM_LATENT),
                sobol_settings(config, parallel),
            )?
        }
        (ModelChoice::PbpkMdz, MethodId::SobolIndependent) => run_independent(
            &pbpk_model(config, PbpkGsaMode::Independent, rho)?,
            config.n,
            seed.substream(STREAM_SOBOL_INDEPENDENT),
            sobol_settings(config, parallel),
        )?,
        (ModelChoice::PbpkMdz, MethodId::SobolGrouped) => estimate_grouped_pair(
            &pbpk_model(config, PbpkGsaMode::Independent, rho)?,
            rho,
            config.n,
            seed.substream(STREAM_SOBOL_GROUPED),
            sobol_settings(config, parallel),
        )?,
        (ModelChoice::PbpkMdz, MethodId::Kucherenko) => {
            let model = pbpk_model(config, PbpkGsaMode::Independent, rho)?;
            let joint = GaussianJoint::with_pair(6, 4, 5, rho)?;
            estimate_kucherenko(
                &model,
                &joint,
                config.n,
                seed.substream(STREAM_KUCHERENKO),
                &KucherenkoSettings { parallel, convergence_ladder: convergence_ladder(config.n) },
            )?
        }
        (ModelChoice::PbpkMdz, MethodId::Latent) => run_independent(
            &pbpk_model(config, PbpkGsaMode::Latent, rho)?,
            config.n,
            seed.substream(STREAM_LATENT),
            sobol_settings(config, parallel),
        )?,
    };
    report.method = method.as_str().to_string();
    report.rho = method.uses_rho().then_some(rho);
    Ok(report)
}

/// `run`: one report set per (method, rho), a combined summary, per-run error
/// records, and a partial-failure exit code when some analyses fail.
pub fn run_command(config: &RunConfig, out_dir: &Path) -> Result<RunOutcome, CliError> {
    fs::create_dir_all(out_dir)?;
    let mut outcome = RunOutcome::default();
    let mut summary = String::new();
    for &rho in &config.rho_values {
        for &method in &config.methods {
            let label = crate::report::report_stem(config.model, method, method.uses_rho().then_some(rho));
            let started = Instant::now();
            match run_single(config, method, rho) {
                Ok(report) => {
                    let files = write_analysis(out_dir, config, method, &report)?;
                    println!(
                        "completed {label} in {:.2}s ({} evaluations)",
                        started.elapsed().as_secs_f64(),
                        report.evaluations
                    );
                    summary.push_str(&summary_block(&label, &report));
                    outcome.written.extend(files);
                    outcome.completed += 1;
                }
                Err(CliError::Config(msg)) => return Err(CliError::Config(msg)),
                Err(err) => {
                    eprintln!("error: {label}: {err}");
                    outcome.errors.push(format!("{label}: {err}"));
                }
            }
        }
    }
    let summary_path = out_dir.join("summary.txt");
    fs::write(&summary_path, summary)?;
    outcome.written.push(summary_path);
    if !outcome.errors.is_empty() {
        let errors_path = out_dir.join("errors.txt");
        fs::write(&errors_path, outcome.errors.join("\n") + "\n")?;
        outcome.written.push(errors_path);
    }
    Ok(outcome)
}

/// `sweep`: one combined long-format table over the rho grid, common random
/// numbers across grid points.
pub fn sweep_command(config: &RunConfig, out_dir: &Path) -> Result<RunOutcome, CliError> {
    fs::create_dir_all(out_dir)?;
    let mut outcome = RunOutcome::default();
    let mut rows = String::from("rho,method,factor,index,value,lo,hi\n");
    for &rho in &config.rho_values {
        for &method in &config.methods {
            let label = format!("{} {} rho {rho:+.2}", config.model.as_str(), method.as_str());
            match run_single(config, method, rho) {
                Ok(report) => {
                    for f in &report.factors {
                        let ci = |v: Option<(f64, f64)>| match v {
                            Some((lo, hi)) => {
                                (crate::report::format_float(lo), crate::report::format_float(hi))
                            }
                            None => (String::new(), String::new()),
                        };
                        let (mlo, mhi) = ci(f.main_ci);
                        let (tlo, thi) = ci(f.total_ci);
                        writeln!(
                            rows,
                            "{rho:+.4},{},{},main,{},{mlo},{mhi}",
                            method.as_str(),
                            f.name,
                            crate::report::format_float(f.main)
                        )
                        .unwrap();
                        writeln!(
                            rows,
                            "{rho:+.4},{},{},total,{},{tlo},{thi}",
                            method.as_str(),
                            f.name,
                            crate::report::format_float(f.total)
                        )
                        .unwrap();
                    }
                    outcome.completed += 1;
                }
                Err(CliError::Config(msg)) => return Err(CliError::Config(msg)),
                Err(err) => {
                    eprintln!("error: {label}: {err}");
                    outcome.errors.push(format!("{label}: {err}"));
                }
            }
        }
    }
    let stem = format!("{}_sweep", config.model.as_str());
    let csv_path = out_dir.join(format!("{stem}.csv"));
    fs::write(&csv_path, rows)?;
    outcome.written.push(csv_path);

    #[derive(serde::Serialize)]
    struct SweepMeta<'a> {
        schema_version: u32,
        model: &'a str,
        methods: Vec<&'static str>,
        rho_grid: &'a [f64],
        n: usize,
        seed: u64,
        files: Vec<String>,
    }
    let meta = SweepMeta {
        schema_version: crate::report::SCHEMA_VERSION,
        model: config.model.as_str(),
        methods: config.methods.iter().map(|m| m.as_str()).collect(),
        rho_grid: &config.rho_values,
        n: config.n,
        seed: config.seed,
        files: vec![format!("{stem}.csv")],
    };
    let meta_path = out_dir.join(format!("{stem}.meta.json"));
    fs::write(&meta_path, serde_json::to_string_pretty(&meta)? + "\n")?;
    outcome.written.push(meta_path);
    Ok(outcome)
}

//! Run configuration: a TOML file with a fixed, fail-closed grammar.
//!
//! Unknown keys are rejected so typos cannot silently change an analysis.
//! See the repository README for the documented grammar.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use gsa_core::algebraic::ModelId;
use gsa_core::ode::Method as OdeMethod;
use gsa_core::sampling::SequenceKind;

use crate::CliError;

/// Analysis method identifiers as they appear in config files and reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodId {
    SobolIndependent,
    SobolGrouped,
    Kucherenko,
    Latent,
}

impl MethodId {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodId::SobolIndependent => "sobol_independent",
            MethodId::SobolGrouped => "sobol_grouped",
            MethodId::Kucherenko => "kucherenko",
            MethodId::Latent => "latent",
        }
    }

    /// Whether the method consumes the correlation coefficient.
    pub fn uses_rho(self) -> bool {
        !matches!(self, MethodId::SobolIndependent)
    }
}

/// Which model a run targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    Algebraic(ModelId),
    PbpkMdz,
}

impl ModelChoice {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        if s == "pbpk_mdz" {
            return Ok(ModelChoice::PbpkMdz);
        }
        ModelId::parse(s)
            .map(ModelChoice::Algebraic)
            .ok_or_else(|| CliError::Config(format!(
                "unknown model '{s}' (expected model1|model2|model3|pbpk_mdz)"
            )))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModelChoice::Algebraic(id) => id.as_str(),
            ModelChoice::PbpkMdz => "pbpk_mdz",
        }
    }
}

/// A single correlation or a sweep list.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RhoSpec {
    One(f64),
    Many(Vec<f64>),
}

impl RhoSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            RhoSpec::One(v) => vec![*v],
            RhoSpec::Many(vs) => vs.clone(),
        }
    }
}

fn default_n() -> usize {
    10_000
}

fn default_bootstrap() -> usize {
    1000
}

fn default_sampling() -> String {
    "pseudo".into()
}

fn default_solver() -> String {
    "sdirk".into()
}

fn default_dose() -> f64 {
    5.0
}

fn default_t_end() -> f64 {
    168.0
}

fn default_rtol() -> f64 {
    1e-8
}

fn default_atol() -> f64 {
    1e-10
}

fn default_co_male() -> f64 {
    5.6
}

fn default_co_female() -> f64 {
    4.9
}

fn default_subjects() -> usize {
    10_000
}

fn default_modes() -> Vec<String> {
    vec!["independent".into(), "correlated".into()]
}

fn default_grid_points() -> usize {
    200
}

/// PBPK-specific overrides.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PbpkSection {
    #[serde(default = "default_dose")]
    pub dose_mg: f64,
    #[serde(default = "default_t_end")]
    pub t_end_h: f64,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    /// Mean cardiac output assumptions in L/min; not part of the published
    /// parameter tables.
    #[serde(default = "default_co_male")]
    pub co_mean_male_l_min: f64,
    #[serde(default = "default_co_female")]
    pub co_mean_female_l_min: f64,
    #[serde(default = "default_solver")]
    pub solver: String,
}

impl Default for PbpkSection {
    fn default() -> Self {
        Self {
            dose_mg: default_dose(),
            t_end_h: default_t_end(),
            rtol: default_rtol(),
            atol: default_atol(),
            co_mean_male_l_min: default_co_male(),
            co_mean_female_l_min: default_co_female(),
            solver: default_solver(),
        }
    }
}

/// Population-simulation options.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PopulationSection {
    #[serde(default = "default_subjects")]
    pub subjects: usize,
    /// Subject-generation modes: "independent" and/or "correlated".
    #[serde(default = "default_modes")]
    pub modes: Vec<String>,
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
}

impl Default for PopulationSection {
    fn default() -> Self {
        Self {
            subjects: default_subjects(),
            modes: default_modes(),
            grid_points: default_grid_points(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: String,
    methods: Vec<String>,
    #[serde(default)]
    rho: Option<RhoSpec>,
    #[serde(default = "default_n")]
    n: usize,
    #[serde(default = "default_bootstrap")]
    bootstrap: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    out_dir: Option<PathBuf>,
    /// 0 means all available cores.
    #[serde(default)]
    threads: usize,
    #[serde(default = "default_sampling")]
    sampling: String,
    #[serde(default)]
    pbpk: Option<PbpkSection>,
    #[serde(default)]
    population: Option<PopulationSection>,
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelChoice,
    pub methods: Vec<MethodId>,
    pub rho_values: Vec<f64>,
    pub n: usize,
    pub bootstrap: usize,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub threads: usize,
    pub sampling: SequenceKind,
    pub pbpk: PbpkSection,
    pub population: PopulationSection,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| CliError::Config(format!("config parse error: {e}")))?;
        let model = ModelChoice::parse(&raw.model)?;
        if raw.methods.is_empty() {
            return Err(CliError::Config("methods must be non-empty".into()));
        }
        let mut methods = Vec::new();
        for m in &raw.methods {
            let id = match m.as_str() {
                "sobol_independent" => MethodId::SobolIndependent,
                "sobol_grouped" => MethodId::SobolGrouped,
                "kucherenko" => MethodId::Kucherenko,
                "latent" => MethodId::Latent,
                other => {
                    return Err(CliError::Config(format!("unknown method '{other}'")));
                }
            };
            if methods.contains(&id) {
                return Err(CliError::Config(format!("method '{m}' listed twice")));
            }
            methods.push(id);
        }
        if raw.n < 100 {
            return Err(CliError::Config(format!("n must be at least 100, got {}", raw.n)));
        }
        let needs_rho = methods.iter().any(|m| m.uses_rho());
        let rho_values = match (&raw.rho, model) {
            (Some(spec), _) => spec.values(),
            (None, ModelChoice::PbpkMdz) => vec![0.52],
            (None, _) if needs_rho => {
                return Err(CliError::Config(
                    "rho is required for sobol_grouped/kucherenko/latent on the algebraic models"
                        .into(),
                ));
            }
            (None, _) => vec![0.0],
        };
        if rho_values.is_empty() {
            return Err(CliError::Config("rho sweep list must be non-empty".into()));
        }
        for &r in &rho_values {
            if !r.is_finite() || r.abs() >= 1.0 {
                return Err(CliError::Config(format!(
                    "rho values must lie strictly inside (-1, 1), got {r}"
                )));
            }
        }
        let sampling = match raw.sampling.as_str() {
            "pseudo" => SequenceKind::PseudoRandom,
            "halton" => SequenceKind::Halton,
            other => {
                return Err(CliError::Config(format!(
                    "unknown sampling '{other}' (expected pseudo|halton)"
                )));
            }
        };
        let pbpk = raw.pbpk.unwrap_or_default();
        if !(pbpk.dose_mg >= 0.0) || !(pbpk.t_end_h > 0.0) {
            return Err(CliError::Config("pbpk dose must be >= 0 and t_end > 0".into()));
        }
        pbpk_solver(&pbpk.solver)?;
        let population = raw.population.unwrap_or_default();
        for m in &population.modes {
            if m != "independent" && m != "correlated" {
                return Err(CliError::Config(format!(
                    "unknown population mode '{m}' (expected independent|correlated)"
                )));
            }
        }
        if population.grid_points < 2 {
            return Err(CliError::Config("population grid_points must be at least 2".into()));
        }
        Ok(RunConfig {
            model,
            methods,
            rho_values,
            n: raw.n,
            bootstrap: raw.bootstrap,
            seed: raw.seed,
            out_dir: raw.out_dir,
            threads: raw.threads,
            sampling,
            pbpk,
            population,
        })
    }
}

pub fn pbpk_solver(name: &str) -> Result<OdeMethod, CliError> {
    match name {
        "sdirk" => Ok(OdeMethod::Sdirk),
        "dopri" => Ok(OdeMethod::DormandPrince),
        other => Err(CliError::Config(format!("unknown solver '{other}' (expected sdirk|dopri)"))),
    }
}

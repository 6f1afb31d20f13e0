//! GSA factor mapping for the PBPK model.
//!
//! The analysis varies seven quantities at most: sex, height, BMI, MPPGL,
//! and the CYP3A4/CYP3A5 abundances — with the abundance pair represented
//! either directly (independent / jointly-correlated modes, 6 coordinates)
//! or through its latent decomposition (7 coordinates: the two unique
//! variances plus the latent variable). All simulated individuals express
//! CYP3A5.

use crate::error::Result;
use crate::latent;
use crate::model::GsaModel;
use crate::sampling::normal_cdf;
use crate::scalar::Scalar;

use super::individual::{assemble, Individual, PopulationConfig};
use super::system::{simulate_subject, SimulationSettings};
use super::tissue::{Sex, TissueTable};
use super::DrugParams;

/// How the correlated abundance pair enters the factor space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PbpkGsaMode {
    /// Six independent factors; correlation ignored.
    Independent,
    /// Six factors with `(log CYP3A4, log CYP3A5)` bivariate normal at the
    /// configured correlation. Used by the grouped estimator (the pair is
    /// pick-frozen together) and by population simulation.
    CorrelatedPair,
    /// Seven independent factors: the abundances are reconstructed from
    /// `(eps_3A4, eps_3A5, eta)` on the log scale, then exponentiated.
    Latent,
}

impl PbpkGsaMode {
    pub fn dimension(self) -> usize {
        match self {
            PbpkGsaMode::Independent | PbpkGsaMode::CorrelatedPair => 6,
            PbpkGsaMode::Latent => 7,
        }
    }
}

/// Maps a 7-vector of GSA coordinates to a subject.
///
/// `u[0]` is the uniform sex coordinate on [0, 1); the remaining entries are
/// standard normal. Coordinate order: sex, height, BMI, MPPGL, then the
/// abundance coordinates — `(z_3A4, z_3A5, unused)` for the six-factor modes
/// and `(eps_3A4, eps_3A5, eta)` in latent mode.
pub fn gsa_input_map<R: Scalar>(
    u: &[R],
    mode: PbpkGsaMode,
    table: &TissueTable,
    config: &PopulationConfig<R>,
) -> Result<Individual<R>> {
    assert_eq!(u.len(), 7, "gsa_input_map takes a 7-vector");
    let sex = if u[0] < R::cast(0.5) { Sex::Female } else { Sex::Male };
    let height = config.height_marginal(sex).transform(u[1]);
    let bmi = config.bmi.transform(u[2]);
    let mppgl = config.mppgl.transform(u[3]);
    let (z4, z5) = match mode {
        PbpkGsaMode::Independent => (u[4], u[5]),
        PbpkGsaMode::CorrelatedPair => {
            let rho = config.rho_cyp;
            (u[4], rho * u[4] + (R::one() - rho * rho).sqrt() * u[5])
        }
        PbpkGsaMode::Latent => {
            let d = latent::decompose(config.rho_cyp)?;
            let eps4 = d.sigma1_sq.sqrt() * u[4];
            let eps5 = d.sigma2_sq.sqrt() * u[5];
            latent::reconstruct_pair(u[6], eps4, eps5, &d)
        }
    };
    let cyp3a4 = config.cyp3a4.transform(z4);
    let cyp3a5 = config.cyp3a5.transform(z5);
    Ok(assemble(table, config, sex, height, bmi, mppgl, cyp3a4, cyp3a5))
}

/// The PBPK model as a GSA target: coordinates in, AUC out.
///
/// Integration failures surface as NaN, which the estimators reject with the
/// offending row.
pub struct PbpkAucModel<R> {
    pub table: TissueTable,
    pub drug: DrugParams<R>,
    pub config: PopulationConfig<R>,
    pub dose_mg: R,
    pub sim: SimulationSettings<R>,
    pub mode: PbpkGsaMode,
}

impl<R: Scalar> PbpkAucModel<R> {
    pub fn new(mode: PbpkGsaMode) -> Self {
        Self {
            table: TissueTable::builtin(),
            drug: DrugParams::midazolam(),
            config: PopulationConfig::reference(),
            dose_mg: R::cast(5.0),
            sim: SimulationSettings::default(),
            mode,
        }
    }

    /// The subject behind a coordinate row (all-standard-normal convention).
    pub fn subject_at(&self, coords: &[R]) -> Result<Individual<R>> {
        let mut u = [R::zero(); 7];
        u[0] = normal_cdf(coords[0]);
        for (slot, &c) in u.iter_mut().skip(1).zip(coords.iter().skip(1)) {
            *slot = c;
        }
        gsa_input_map(&u, self.mode, &self.table, &self.config)
    }
}

impl<R: Scalar> GsaModel<R> for PbpkAucModel<R> {
    fn dimension(&self) -> usize {
        self.mode.dimension()
    }

    fn factor_names(&self) -> Vec<String> {
        let mut names: Vec<String> =
            ["sex", "height", "BMI", "MPPGL"].iter().map(|s| s.to_string()).collect();
        match self.mode {
            PbpkGsaMode::Independent | PbpkGsaMode::CorrelatedPair => {
                names.push("CYP3A4".into());
                names.push("CYP3A5".into());
            }
            PbpkGsaMode::Latent => {
                names.push("eps_CYP3A4".into());
                names.push("eps_CYP3A5".into());
                names.push("eta".into());
            }
        }
        names
    }

    fn correlated_pair(&self) -> Option<(usize, usize)> {
        match self.mode {
            // The abundance pair is eligible for joint treatment whenever it
            // appears as raw coordinates (the grouped and Kucherenko paths
            // apply the joint law on top of the independent map).
            PbpkGsaMode::Independent | PbpkGsaMode::CorrelatedPair => Some((4, 5)),
            PbpkGsaMode::Latent => None,
        }
    }

    fn eval(&self, coords: &[R]) -> R {
        let individual = match self.subject_at(coords) {
            Ok(ind) => ind,
            Err(_) => return R::nan(),
        };
        match simulate_subject(&individual, &self.drug, &self.table, self.dose_mg, &self.sim) {
            Ok((_, auc)) => auc,
            Err(_) => R::nan(),
        }
    }
}

//! Virtual-subject physiology generation.
//!
//! The algorithm: draw sex; fix the sex-specific height distribution, mean
//! height and mean cardiac output; draw height and BMI; body weight
//! `BW = BMI·h²`; cardiac output by allometric height scaling
//! `CO = (h/h_mean)^0.75 · CO_mean`; organ weights and flows from the
//! body-weight and cardiac-output fractions; volumes from organ densities.
//! Arterial and venous blood volumes take 6% and 18% of total blood weight.

use rand::Rng;

use crate::error::Result;
use crate::sampling::Marginal;
use crate::scalar::Scalar;

use super::tissue::{
    Organ, Sex, TissueTable, ARTERIAL_BLOOD_FRACTION, VENOUS_BLOOD_FRACTION,
};

/// Population marginals and physiology constants.
#[derive(Debug, Clone)]
pub struct PopulationConfig<R> {
    /// Height marginals, normal per sex: indexed `[male, female]`.
    pub height_cm: [Marginal<R>; 2],
    pub mean_height_cm: [R; 2],
    /// Mean cardiac output in L/min per sex. Not reported with the model
    /// tables; these defaults are an assumption and are flagged as such in
    /// run metadata.
    pub co_mean_l_min: [R; 2],
    pub bmi: Marginal<R>,
    pub mppgl: Marginal<R>,
    pub cyp3a4: Marginal<R>,
    pub cyp3a5: Marginal<R>,
    /// Correlation between log CYP3A4 and log CYP3A5 abundances.
    pub rho_cyp: R,
}

impl<R: Scalar> PopulationConfig<R> {
    /// Reference healthy-adult population.
    pub fn reference() -> Self {
        Self {
            height_cm: [
                Marginal::normal(R::cast(176.7), R::cast(6.15)).unwrap(),
                Marginal::normal(R::cast(163.3), R::cast(5.85)).unwrap(),
            ],
            mean_height_cm: [R::cast(176.7), R::cast(163.3)],
            co_mean_l_min: [R::cast(5.6), R::cast(4.9)],
            bmi: Marginal::uniform(R::cast(18.5), R::cast(24.9)).unwrap(),
            mppgl: Marginal::lognormal_from_mean_cv(R::cast(39.79), R::cast(0.27)).unwrap(),
            cyp3a4: Marginal::lognormal_from_mean_cv(R::cast(137.0), R::cast(0.41)).unwrap(),
            cyp3a5: Marginal::lognormal_from_mean_cv(R::cast(103.0), R::cast(0.65)).unwrap(),
            rho_cyp: R::cast(0.52),
        }
    }

    fn sex_slot(sex: Sex) -> usize {
        match sex {
            Sex::Male => 0,
            Sex::Female => 1,
        }
    }

    pub fn height_marginal(&self, sex: Sex) -> &Marginal<R> {
        &self.height_cm[Self::sex_slot(sex)]
    }

    pub fn mean_height(&self, sex: Sex) -> R {
        self.mean_height_cm[Self::sex_slot(sex)]
    }

    pub fn co_mean_l_h(&self, sex: Sex) -> R {
        self.co_mean_l_min[Self::sex_slot(sex)] * R::cast(60.0)
    }
}

/// One virtual subject: anthropometrics, flows, volumes, and liver enzymology.
#[derive(Debug, Clone)]
pub struct Individual<R> {
    pub sex: Sex,
    pub height_cm: R,
    pub bmi: R,
    pub bw_kg: R,
    pub cardiac_output_l_h: R,
    pub organ_weights_kg: [R; 15],
    pub organ_volumes_l: [R; 15],
    pub organ_flows_l_h: [R; 15],
    pub v_art_l: R,
    pub v_ven_l: R,
    pub liver_weight_g: R,
    /// mg microsomal protein per g liver.
    pub mppgl: R,
    /// pmol CYP3A4 per mg microsomal protein.
    pub cyp3a4: R,
    /// pmol CYP3A5 per mg microsomal protein.
    pub cyp3a5: R,
}

/// Assembles the physiology for given top-level attributes.
pub fn assemble<R: Scalar>(
    table: &TissueTable,
    config: &PopulationConfig<R>,
    sex: Sex,
    height_cm: R,
    bmi: R,
    mppgl: R,
    cyp3a4: R,
    cyp3a5: R,
) -> Individual<R> {
    let h_m = height_cm / R::cast(100.0);
    let bw = bmi * h_m * h_m;
    let co = (height_cm / config.mean_height(sex)).powf(R::cast(0.75)) * config.co_mean_l_h(sex);

    let flow_fractions = table.normalized_flow_fractions(sex);
    let mut weights = [R::zero(); 15];
    let mut volumes = [R::zero(); 15];
    let mut flows = [R::zero(); 15];
    for organ in Organ::ALL {
        let i = organ.index();
        let row = table.row(organ);
        weights[i] = R::cast(table.weight_fraction(organ, sex)) * bw;
        volumes[i] = weights[i] / R::cast(row.density);
        flows[i] = R::cast(flow_fractions[i]) * co;
    }
    let blood_weight = R::cast(table.blood_weight_fraction(sex)) * bw;
    Individual {
        sex,
        height_cm,
        bmi,
        bw_kg: bw,
        cardiac_output_l_h: co,
        organ_weights_kg: weights,
        organ_volumes_l: volumes,
        organ_flows_l_h: flows,
        // Blood density is 1 kg/L, so weights in kg equal volumes in L.
        v_art_l: R::cast(ARTERIAL_BLOOD_FRACTION) * blood_weight,
        v_ven_l: R::cast(VENOUS_BLOOD_FRACTION) * blood_weight,
        liver_weight_g: weights[Organ::Liver.index()] * R::cast(1000.0),
        mppgl,
        cyp3a4,
        cyp3a5,
    }
}

/// Whether the CYP3A4/CYP3A5 abundances are drawn jointly or independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CypCorrelation {
    Independent,
    /// Bivariate normal on the log scale at the configured `rho_cyp`.
    Correlated,
}

/// The six base draws behind one subject, in the fixed draw order.
///
/// Keeping these explicit lets paired-seed comparisons reuse identical draws
/// across correlation modes.
#[derive(Debug, Clone, Copy)]
pub struct BaseDraws<R> {
    pub sex_u: R,
    pub z_height: R,
    pub z_bmi: R,
    pub z_mppgl: R,
    pub z_cyp3a4: R,
    pub z_cyp3a5: R,
}

impl<R: Scalar> BaseDraws<R> {
    pub fn sample<G: Rng + ?Sized>(rng: &mut G) -> Self {
        Self {
            sex_u: R::standard_uniform(rng),
            z_height: R::standard_normal(rng),
            z_bmi: R::standard_normal(rng),
            z_mppgl: R::standard_normal(rng),
            z_cyp3a4: R::standard_normal(rng),
            z_cyp3a5: R::standard_normal(rng),
        }
    }
}

/// Builds a subject from base draws under the requested correlation mode.
pub fn subject_from_draws<R: Scalar>(
    table: &TissueTable,
    config: &PopulationConfig<R>,
    draws: &BaseDraws<R>,
    mode: CypCorrelation,
) -> Result<Individual<R>> {
    // If the extracted value is < 0.5 the subject is female, otherwise male.
    let sex = if draws.sex_u < R::cast(0.5) { Sex::Female } else { Sex::Male };
    let height = config.height_marginal(sex).transform(draws.z_height);
    let bmi = config.bmi.transform(draws.z_bmi);
    let mppgl = config.mppgl.transform(draws.z_mppgl);
    let z5 = match mode {
        CypCorrelation::Independent => draws.z_cyp3a5,
        CypCorrelation::Correlated => {
            let rho = config.rho_cyp;
            rho * draws.z_cyp3a4 + (R::one() - rho * rho).sqrt() * draws.z_cyp3a5
        }
    };
    let cyp3a4 = config.cyp3a4.transform(draws.z_cyp3a4);
    let cyp3a5 = config.cyp3a5.transform(z5);
    Ok(assemble(table, config, sex, height, bmi, mppgl, cyp3a4, cyp3a5))
}

/// Draws one random subject.
pub fn generate_individual<R: Scalar, G: Rng + ?Sized>(
    rng: &mut G,
    table: &TissueTable,
    config: &PopulationConfig<R>,
    mode: CypCorrelation,
) -> Result<Individual<R>> {
    let draws = BaseDraws::sample(rng);
    subject_from_draws(table, config, &draws, mode)
}

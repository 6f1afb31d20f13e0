//! Whole-body midazolam PBPK model: drug parameters, tissue-to-plasma
//! partitioning, virtual-subject physiology, the compiled mass-balance
//! right-hand side, and the GSA factor mapping.
//!
//! Units are coherent throughout: amounts mg, volumes L, flows L/h, time h.
//! Michaelis constants convert from µM via the molecular weight; in-vivo
//! maximum rates convert from pmol/min at assembly time.

mod drug;
mod gsa;
mod individual;
mod system;
mod tissue;

pub use drug::{DrugParams, DvowRule, MichaelisMenten};
pub use gsa::{gsa_input_map, PbpkAucModel, PbpkGsaMode};
pub use individual::{
    assemble, generate_individual, subject_from_draws, BaseDraws, CypCorrelation, Individual,
    PopulationConfig,
};
pub use system::{
    build_system, simulate_subject, PbpkSystem, SimulationSettings, N_STATES, STATE_ARTERIAL,
    STATE_MET_3A4, STATE_MET_3A5, STATE_VENOUS,
};
pub use tissue::{
    Composition, Organ, Sex, TissueRow, TissueTable, ARTERIAL_BLOOD_FRACTION,
    VENOUS_BLOOD_FRACTION,
};

use crate::scalar::Scalar;

/// Tissue-to-plasma partition coefficient (Berezhkovskiy composition model):
///
/// ```text
/// P_t:p = [D_vow·(f_nl + 0.3·f_ph) + (f_w/fu_t + 0.7·f_ph)]_tissue
///       / [D_vow·(f_nl + 0.3·f_ph) + (f_w/fu_p + 0.7·f_ph)]_plasma
/// ```
pub fn partition_coefficient<R: Scalar>(
    drug: &DrugParams<R>,
    tissue: &Composition,
    plasma: &Composition,
) -> R {
    partition_coefficient_with_fu(drug, tissue, drug.fu_t(), plasma)
}

/// Same, with the tissue-side unbound fraction supplied explicitly. A tissue
/// with plasma's composition and plasma's unbound fraction partitions at
/// exactly one.
pub fn partition_coefficient_with_fu<R: Scalar>(
    drug: &DrugParams<R>,
    tissue: &Composition,
    fu_tissue: R,
    plasma: &Composition,
) -> R {
    let d_vow = drug.d_vow();
    membrane_affinity(d_vow, tissue, fu_tissue)
        / membrane_affinity(d_vow, plasma, drug.fu_p)
}

fn membrane_affinity<R: Scalar>(d_vow: R, c: &Composition, fu: R) -> R {
    let nl = R::cast(c.neutral_lipid);
    let ph = R::cast(c.phospholipid);
    let w = R::cast(c.water);
    d_vow * (nl + R::cast(0.3) * ph) + (w / fu + R::cast(0.7) * ph)
}

/// Scales an in-vitro maximum rate to the whole liver:
/// `pmol/min = V_max · [CYP] · MPPGL · W_liv`, then converted to mg/h.
pub fn vmax_invivo<R: Scalar>(
    vmax_invitro: R,
    cyp_abundance: R,
    mppgl: R,
    liver_weight_g: R,
    molecular_weight: R,
) -> R {
    let pmol_per_min = vmax_invitro * cyp_abundance * mppgl * liver_weight_g;
    pmol_per_min * R::cast(60.0) * molecular_weight * R::cast(1e-9)
}

/// Converts a Michaelis constant from µM to mg/L.
pub fn km_to_mg_per_l<R: Scalar>(km_um: R, molecular_weight: R) -> R {
    km_um * molecular_weight / R::cast(1000.0)
}

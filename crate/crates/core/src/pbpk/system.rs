//! Compiled PBPK right-hand side and subject simulation.
//!
//! State layout (amounts in mg): indices 0..15 are the organs in canonical
//! order, 15 arterial blood, 16 venous blood, and two bookkeeping states for
//! cumulatively metabolized mass (17: CYP3A4, 18: CYP3A5) that close the mass
//! balance. The venous plasma concentration observable is
//! `x_ven / (V_ven · B:P)`; its running integral (AUC) is attached by the
//! integrator as a further augmented state.
//!
//! Flow topology: lungs receive the full cardiac output from venous blood;
//! every other organ is fed from arterial blood; splanchnic outflows drain
//! into the liver; the liver and the remaining organs drain into venous
//! blood. Metabolism removes drug from the liver through four
//! Michaelis–Menten pathways evaluated at the unbound liver concentration
//! `c_u = x_liv · fu_t / V_liv`.

use crate::error::{Error, Result};
use crate::ode::{self, Method, OdeProblem, SolverSettings, StepMode, Trajectory};
use crate::scalar::Scalar;

use super::drug::DrugParams;
use super::individual::Individual;
use super::tissue::{Organ, TissueTable};
use super::{km_to_mg_per_l, partition_coefficient, vmax_invivo};

pub const N_STATES: usize = 19;
pub const STATE_ARTERIAL: usize = 15;
pub const STATE_VENOUS: usize = 16;
pub const STATE_MET_3A4: usize = 17;
pub const STATE_MET_3A5: usize = 18;

/// One subject's compiled PBPK system.
#[derive(Debug, Clone)]
pub struct PbpkSystem<R> {
    pub volumes_l: [R; 15],
    pub flows_l_h: [R; 15],
    pub partition: [R; 15],
    pub v_art_l: R,
    pub v_ven_l: R,
    pub q_tot_l_h: R,
    pub b_to_p: R,
    pub fu_t: R,
    /// In-vivo maximum rates, mg/h, ordered as the drug's MM entries.
    pub vmax_mg_h: [R; 4],
    /// Michaelis constants, mg/L.
    pub km_mg_l: [R; 4],
    pub dose_mg: R,
    pub fu_p_exp: R,
}

/// Assembles the per-subject system: partition coefficients, in-vivo enzyme
/// rates, unit conversions, and the dosing initial condition.
pub fn build_system<R: Scalar>(
    individual: &Individual<R>,
    drug: &DrugParams<R>,
    table: &TissueTable,
    dose_mg: R,
) -> Result<PbpkSystem<R>> {
    if dose_mg < R::zero() || !dose_mg.is_finite() {
        return Err(Error::InvalidArgument("dose must be a finite non-negative amount".into()));
    }
    for organ in Organ::ALL {
        let i = organ.index();
        if !(individual.organ_volumes_l[i] > R::zero()) {
            return Err(Error::InvalidArgument(format!("non-positive volume for {organ}")));
        }
    }
    let mut partition = [R::zero(); 15];
    for organ in Organ::ALL {
        partition[organ.index()] =
            partition_coefficient(drug, &table.row(organ).composition, &table.plasma);
    }
    let mut vmax = [R::zero(); 4];
    let mut km = [R::zero(); 4];
    for (slot, entry) in drug.mm_entries.iter().enumerate() {
        let abundance = if entry.enzyme == "3A4" { individual.cyp3a4 } else { individual.cyp3a5 };
        vmax[slot] = vmax_invivo(
            entry.vmax_invitro,
            abundance,
            individual.mppgl,
            individual.liver_weight_g,
            drug.molecular_weight,
        );
        km[slot] = km_to_mg_per_l(entry.km_um, drug.molecular_weight);
    }
    Ok(PbpkSystem {
        volumes_l: individual.organ_volumes_l,
        flows_l_h: individual.organ_flows_l_h,
        partition,
        v_art_l: individual.v_art_l,
        v_ven_l: individual.v_ven_l,
        q_tot_l_h: individual.cardiac_output_l_h,
        b_to_p: drug.b_to_p,
        fu_t: drug.fu_t(),
        fu_p_exp: drug.fu_p,
        vmax_mg_h: vmax,
        km_mg_l: km,
        dose_mg,
    })
}

impl<R: Scalar> PbpkSystem<R> {
    /// IV bolus: the whole dose starts in venous blood.
    pub fn initial_state(&self) -> Vec<R> {
        let mut y = vec![R::zero(); N_STATES];
        y[STATE_VENOUS] = self.dose_mg;
        y
    }

    /// Outflowing blood concentration of organ `i`: `(x/V)/(P/B:P)`.
    #[inline]
    fn outflow_concentration(&self, y: &[R], i: usize) -> R {
        y[i] / self.volumes_l[i] * self.b_to_p / self.partition[i]
    }

    fn experiment(name: &str) -> bool {
        std::env::var("PBPK_EXP").map(|v| v.contains(name)).unwrap_or(false)
    }

    /// Metabolic fluxes (mg/h) through CYP3A4 and CYP3A5 at the current state.
    #[inline]
    pub fn metabolic_fluxes(&self, y: &[R]) -> (R, R) {
        let liver = Organ::Liver.index();
        let c_u = if Self::experiment("cu_conventional") {
            // unbound plasma-equivalent concentration
            y[liver] / self.volumes_l[liver] * self.fu_p_exp / self.partition[liver]
        } else {
            y[liver] * self.fu_t / self.volumes_l[liver]
        };
        let path = |slot: usize| self.vmax_mg_h[slot] * c_u / (self.km_mg_l[slot] + c_u);
        (path(0) + path(1), path(2) + path(3))
    }

    /// Mass-balance right-hand side.
    pub fn rhs(&self, y: &[R], dydt: &mut [R]) {
        let lung = Organ::Lung.index();
        let liver = Organ::Liver.index();
        let c_art = y[STATE_ARTERIAL] / self.v_art_l;
        let c_ven = y[STATE_VENOUS] / self.v_ven_l;
        let out_lung = self.outflow_concentration(y, lung);

        let mut venous_return = R::zero();
        let mut splanchnic_to_liver = R::zero();
        for organ in Organ::ALL {
            let i = organ.index();
            if organ == Organ::Lung {
                dydt[i] = self.q_tot_l_h * (c_ven - out_lung);
                continue;
            }
            let q = self.flows_l_h[i];
            let out = self.outflow_concentration(y, i);
            dydt[i] = q * (c_art - out);
            if organ.is_splanchnic() {
                splanchnic_to_liver += q * out;
            } else {
                venous_return += q * out;
            }
        }
        let (met_3a4, met_3a5) = self.metabolic_fluxes(y);
        dydt[liver] += splanchnic_to_liver - met_3a4 - met_3a5;
        if Self::experiment("full_drainage") {
            // hepatic vein carries arterial + portal flow
            let q_s: R = Organ::SPLANCHNIC.iter().map(|o| self.flows_l_h[o.index()]).sum();
            let extra = q_s * self.outflow_concentration(y, liver);
            dydt[liver] -= extra;
            dydt[STATE_VENOUS] += extra;
        }
        dydt[STATE_ARTERIAL] = self.q_tot_l_h * (out_lung - c_art);
        dydt[STATE_VENOUS] = venous_return - self.q_tot_l_h * c_ven;
        dydt[STATE_MET_3A4] = met_3a4;
        dydt[STATE_MET_3A5] = met_3a5;
    }

    /// `x_ven / (V_ven · B:P)`, mg/L of plasma.
    pub fn venous_plasma_concentration(&self, y: &[R]) -> R {
        y[STATE_VENOUS] / (self.v_ven_l * self.b_to_p)
    }

    /// Drug in the body plus cumulatively metabolized mass; constant at the
    /// dose for a closed run.
    pub fn total_mass(&self, y: &[R]) -> R {
        y[..N_STATES].iter().copied().sum()
    }
}

/// Integrator configuration for subject simulation.
#[derive(Debug, Clone, Copy)]
pub struct SimulationSettings<R> {
    pub t_end_h: R,
    pub rtol: R,
    pub atol: R,
    pub method: Method,
    pub max_steps: usize,
}

impl<R: Scalar> Default for SimulationSettings<R> {
    fn default() -> Self {
        Self {
            t_end_h: R::cast(168.0),
            rtol: R::cast(1e-8),
            atol: R::cast(1e-10),
            method: Method::Sdirk,
            max_steps: 1_000_000,
        }
    }
}

/// Integrates one subject and returns the trajectory (20 states: 19 system
/// states plus the trailing AUC integral) and the AUC of venous plasma
/// concentration over `[0, t_end]` in mg·h/L.
pub fn simulate_subject<R: Scalar>(
    individual: &Individual<R>,
    drug: &DrugParams<R>,
    table: &TissueTable,
    dose_mg: R,
    settings: &SimulationSettings<R>,
) -> Result<(Trajectory<R>, R)> {
    let system = build_system(individual, drug, table, dose_mg)?;
    let problem = OdeProblem {
        dim: N_STATES,
        rhs: |_t: R, y: &[R], dydt: &mut [R]| system.rhs(y, dydt),
        y0: system.initial_state(),
        t_span: (R::zero(), settings.t_end_h),
        rtol: settings.rtol,
        atol: settings.atol,
    };
    let solver = SolverSettings {
        method: settings.method,
        step: StepMode::Adaptive,
        max_steps: settings.max_steps,
        h_init: None,
        h_max: None,
    };
    let (trajectory, auc) =
        ode::auc_augmented(&problem, |y| system.venous_plasma_concentration(y), &solver)?;
    Ok((trajectory, auc))
}

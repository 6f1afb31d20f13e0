//! Midazolam drug parameters, shipped as a versioned key-value file.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One in-vitro Michaelis–Menten entry: an enzyme/metabolite pathway.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MichaelisMenten<R> {
    /// "3A4" or "3A5".
    pub enzyme: &'static str,
    /// "1-OH" or "4-OH".
    pub metabolite: &'static str,
    /// pmol/min per pmol CYP.
    pub vmax_invitro: R,
    /// µM.
    pub km_um: R,
}

/// How `log D_vow` is derived from `log P_ow`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DvowRule {
    /// `log D_vow = 1.115 · log P_ow` (as used by the model).
    #[default]
    Proportional,
    /// `log D_vow = 1.115 · log P_ow − 1.35` (the literature regression).
    WithIntercept,
}

/// Physicochemical and enzymatic drug parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DrugParams<R> {
    /// g/mol
    pub molecular_weight: R,
    pub log_pow: R,
    /// Blood-to-plasma concentration ratio.
    pub b_to_p: R,
    /// Fraction unbound in plasma.
    pub fu_p: R,
    pub mm_entries: [MichaelisMenten<R>; 4],
    pub dvow_rule: DvowRule,
}

const BUILTIN: &str = include_str!("../../data/midazolam_v1.csv");

impl<R: Scalar> DrugParams<R> {
    /// The midazolam parameter set shipped with the crate.
    pub fn midazolam() -> Self {
        Self::parse(BUILTIN).expect("embedded drug table is valid")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn dvow_env() -> DvowRule {
        if std::env::var("PBPK_EXP").map(|v| v.contains("dvow_intercept")).unwrap_or(false) {
            DvowRule::WithIntercept
        } else {
            DvowRule::Proportional
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values: HashMap<&str, f64> = HashMap::new();
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().unwrap_or("");
        if header.trim() != "param,value" {
            return Err(Error::InvalidArgument("drug table header must be 'param,value'".into()));
        }
        for line in lines {
            let (key, value) = line
                .trim()
                .split_once(',')
                .ok_or_else(|| Error::InvalidArgument(format!("bad drug row: {line}")))?;
            let v = value
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad number in drug row: {line}")))?;
            values.insert(key, v);
        }
        let get = |key: &str| -> Result<R> {
            let v = *values
                .get(key)
                .ok_or_else(|| Error::InvalidArgument(format!("drug table lacks '{key}'")))?;
            if v <= 0.0 {
                return Err(Error::InvalidArgument(format!("drug parameter '{key}' must be positive")));
            }
            Ok(R::cast(v))
        };
        let params = Self {
            molecular_weight: get("molecular_weight")?,
            log_pow: get("log_pow")?,
            b_to_p: get("b_to_p")?,
            fu_p: get("fu_p")?,
            mm_entries: [
                MichaelisMenten {
                    enzyme: "3A4",
                    metabolite: "1-OH",
                    vmax_invitro: get("vmax_3a4_1oh")?,
                    km_um: get("km_3a4_1oh")?,
                },
                MichaelisMenten {
                    enzyme: "3A4",
                    metabolite: "4-OH",
                    vmax_invitro: get("vmax_3a4_4oh")?,
                    km_um: get("km_3a4_4oh")?,
                },
                MichaelisMenten {
                    enzyme: "3A5",
                    metabolite: "1-OH",
                    vmax_invitro: get("vmax_3a5_1oh")?,
                    km_um: get("km_3a5_1oh")?,
                },
                MichaelisMenten {
                    enzyme: "3A5",
                    metabolite: "4-OH",
                    vmax_invitro: get("vmax_3a5_4oh")?,
                    km_um: get("km_3a5_4oh")?,
                },
            ],
            dvow_rule: Self::dvow_env(),
        };
        Ok(params)
    }

    /// Vegetable-oil/water partition coefficient.
    pub fn d_vow(&self) -> R {
        let exponent = match self.dvow_rule {
            DvowRule::Proportional => R::cast(1.115) * self.log_pow,
            DvowRule::WithIntercept => R::cast(1.115) * self.log_pow - R::cast(1.35),
        };
        R::cast(10.0).powf(exponent)
    }

    /// Fraction unbound in tissue: `1 / (1 + 0.5·(1 − fu_p)/fu_p)`.
    pub fn fu_t(&self) -> R {
        R::one() / (R::one() + R::cast(0.5) * (R::one() - self.fu_p) / self.fu_p)
    }
}

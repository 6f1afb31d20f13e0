//! Organ composition, weight-fraction, and blood-flow-fraction tables.
//!
//! The table ships as a versioned delimiter-separated file embedded in the
//! crate (`data/tissue_composition_v1.csv`) and can also be loaded from disk.
//! Weight fractions include organ blood content; the `blood` row carries the
//! whole-blood weight fraction from which the arterial (6%) and venous (18%)
//! compartment volumes are derived.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// The fifteen perfused organs, in canonical state order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Organ {
    Adipose,
    Bone,
    Brain,
    Heart,
    Muscle,
    Skin,
    Spleen,
    Kidney,
    Gonads,
    Lung,
    Stomach,
    SmallIntestine,
    LargeIntestine,
    Liver,
    Pancreas,
}

impl Organ {
    pub const ALL: [Organ; 15] = [
        Organ::Adipose,
        Organ::Bone,
        Organ::Brain,
        Organ::Heart,
        Organ::Muscle,
        Organ::Skin,
        Organ::Spleen,
        Organ::Kidney,
        Organ::Gonads,
        Organ::Lung,
        Organ::Stomach,
        Organ::SmallIntestine,
        Organ::LargeIntestine,
        Organ::Liver,
        Organ::Pancreas,
    ];

    /// The splanchnic organs whose venous outflow drains into the liver.
    pub const SPLANCHNIC: [Organ; 5] = [
        Organ::Spleen,
        Organ::Pancreas,
        Organ::Stomach,
        Organ::SmallIntestine,
        Organ::LargeIntestine,
    ];

    pub fn index(self) -> usize {
        Organ::ALL.iter().position(|&o| o == self).unwrap()
    }

    pub fn name(self) -> &'static str {
        match self {
            Organ::Adipose => "adipose",
            Organ::Bone => "bone",
            Organ::Brain => "brain",
            Organ::Heart => "heart",
            Organ::Muscle => "muscle",
            Organ::Skin => "skin",
            Organ::Spleen => "spleen",
            Organ::Kidney => "kidney",
            Organ::Gonads => "gonads",
            Organ::Lung => "lung",
            Organ::Stomach => "stomach",
            Organ::SmallIntestine => "small_intestine",
            Organ::LargeIntestine => "large_intestine",
            Organ::Liver => "liver",
            Organ::Pancreas => "pancreas",
        }
    }

    fn parse(name: &str) -> Option<Organ> {
        Organ::ALL.iter().copied().find(|o| o.name() == name)
    }

    pub fn is_splanchnic(self) -> bool {
        Organ::SPLANCHNIC.contains(&self)
    }
}

impl fmt::Display for Organ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Subject sex; the numeric codes follow the sampling convention
/// (female = 0, male = 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sex {
    Female,
    Male,
}

impl Sex {
    pub fn name(self) -> &'static str {
        match self {
            Sex::Female => "female",
            Sex::Male => "male",
        }
    }
}

/// Volume-fraction composition of a tissue (or of plasma).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Composition {
    pub neutral_lipid: f64,
    pub phospholipid: f64,
    pub water: f64,
}

/// One organ row of the physiology table.
#[derive(Debug, Clone, Copy)]
pub struct TissueRow {
    pub organ: Organ,
    pub composition: Composition,
    /// kg/L
    pub density: f64,
    /// Fraction of body weight, by sex.
    pub weight_fraction: [f64; 2],
    /// Fraction of cardiac output, by sex (raw table value).
    pub flow_fraction: [f64; 2],
}

/// Parsed physiology table.
#[derive(Debug, Clone)]
pub struct TissueTable {
    rows: Vec<TissueRow>,
    pub plasma: Composition,
    /// Whole-blood weight as a fraction of body weight, by sex.
    pub blood_weight_fraction: [f64; 2],
}

/// Arterial compartment share of total blood weight.
pub const ARTERIAL_BLOOD_FRACTION: f64 = 0.06;
/// Venous compartment share of total blood weight.
pub const VENOUS_BLOOD_FRACTION: f64 = 0.18;

const BUILTIN: &str = include_str!("../../data/tissue_composition_v1.csv");

fn sex_idx(sex: Sex) -> usize {
    match sex {
        Sex::Female => 1,
        Sex::Male => 0,
    }
}

impl TissueTable {
    /// The table shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("embedded physiology table is valid")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidArgument("empty physiology table".into()))?;
        let expected = "organ,f_nl,f_ph,f_w,density,wfrac_m,wfrac_f,qfrac_m,qfrac_f";
        if header.trim() != expected {
            return Err(Error::InvalidArgument(format!(
                "physiology table header must be '{expected}'"
            )));
        }
        let mut rows = Vec::new();
        let mut plasma = None;
        let mut blood = None;
        for line in lines {
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != 9 {
                return Err(Error::InvalidArgument(format!("bad physiology row: {line}")));
            }
            let name = fields[0];
            let num = |i: usize| -> Result<f64> {
                fields[i]
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("bad number in row: {line}")))
            };
            match name {
                "plasma" => {
                    plasma = Some(Composition {
                        neutral_lipid: num(1)?,
                        phospholipid: num(2)?,
                        water: num(3)?,
                    });
                }
                "blood" => {
                    blood = Some([num(5)?, num(6)?]);
                }
                _ => {
                    let organ = Organ::parse(name).ok_or_else(|| {
                        Error::InvalidArgument(format!("unknown organ '{name}'"))
                    })?;
                    rows.push(TissueRow {
                        organ,
                        composition: Composition {
                            neutral_lipid: num(1)?,
                            phospholipid: num(2)?,
                            water: num(3)?,
                        },
                        density: num(4)?,
                        weight_fraction: [num(5)?, num(6)?],
                        flow_fraction: [num(7)?, num(8)?],
                    });
                }
            }
        }
        let table = TissueTable {
            rows,
            plasma: plasma
                .ok_or_else(|| Error::InvalidArgument("physiology table lacks plasma row".into()))?,
            blood_weight_fraction: blood
                .ok_or_else(|| Error::InvalidArgument("physiology table lacks blood row".into()))?,
        };
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        if self.rows.len() != Organ::ALL.len() {
            return Err(Error::InvalidArgument(format!(
                "physiology table has {} organ rows, expected {}",
                self.rows.len(),
                Organ::ALL.len()
            )));
        }
        for expected in Organ::ALL {
            if !self.rows.iter().any(|r| r.organ == expected) {
                return Err(Error::InvalidArgument(format!("missing organ {expected}")));
            }
        }
        for r in &self.rows {
            let c = r.composition;
            for v in [c.neutral_lipid, c.phospholipid, c.water] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidArgument(format!(
                        "{}: composition fraction {v} outside [0, 1]",
                        r.organ
                    )));
                }
            }
            if !(0.9..=1.5).contains(&r.density) {
                return Err(Error::InvalidArgument(format!(
                    "{}: density {} outside [0.9, 1.5]",
                    r.organ, r.density
                )));
            }
        }
        Ok(())
    }

    pub fn row(&self, organ: Organ) -> &TissueRow {
        self.rows.iter().find(|r| r.organ == organ).expect("validated table covers all organs")
    }

    pub fn rows(&self) -> &[TissueRow] {
        &self.rows
    }

    pub fn blood_weight_fraction(&self, sex: Sex) -> f64 {
        self.blood_weight_fraction[sex_idx(sex)]
    }

    pub fn weight_fraction(&self, organ: Organ, sex: Sex) -> f64 {
        self.row(organ).weight_fraction[sex_idx(sex)]
    }

    /// Raw table flow fraction (lung carries the full cardiac output).
    pub fn raw_flow_fraction(&self, organ: Organ, sex: Sex) -> f64 {
        self.row(organ).flow_fraction[sex_idx(sex)]
    }

    /// Flow fractions of the arterial-fed organs (everything but lung),
    /// rescaled to sum to exactly one so the circulation closes. The printed
    /// columns sum to 1.0005 (male) and 0.9802 (female); without rescaling
    /// the arterial compartment would leak or accrete mass.
    pub fn normalized_flow_fractions(&self, sex: Sex) -> [f64; 15] {
        let mut fractions = [0.0f64; 15];
        let mut sum = 0.0;
        for organ in Organ::ALL {
            if organ != Organ::Lung {
                let f = self.raw_flow_fraction(organ, sex);
                fractions[organ.index()] = f;
                sum += f;
            }
        }
        for organ in Organ::ALL {
            if organ != Organ::Lung {
                fractions[organ.index()] /= sum;
            } else {
                fractions[organ.index()] = 1.0;
            }
        }
        fractions
    }
}

//! Unit conversions. All internal arithmetic is in hartree atomic units;
//! conversion happens only at I/O boundaries.

use crate::error::{Result, UlrmError};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// 1 hartree in MHz.
pub const MHZ_PER_HARTREE: f64 = 6.5796839207e9;
/// 1 hartree in GHz.
pub const GHZ_PER_HARTREE: f64 = MHZ_PER_HARTREE / 1.0e3;
/// 1 eV in hartree.
pub const HARTREE_PER_EV: f64 = 3.6749322176e-2;
/// 1 e*a0 in Debye.
pub const DEBYE_PER_AU: f64 = 2.541746;
/// Proton mass in electron masses.
pub const PROTON_MASS_AU: f64 = 1836.152673;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyUnit {
    Hartree,
    MHz,
    GHz,
    EV,
}

impl EnergyUnit {
    /// Multiplicative factor turning a value in this unit into hartree.
    pub fn to_hartree_factor(self) -> f64 {
        match self {
            EnergyUnit::Hartree => 1.0,
            EnergyUnit::MHz => 1.0 / MHZ_PER_HARTREE,
            EnergyUnit::GHz => 1.0 / GHZ_PER_HARTREE,
            EnergyUnit::EV => HARTREE_PER_EV,
        }
    }
}

impl FromStr for EnergyUnit {
    type Err = UlrmError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hartree" | "au" => Ok(EnergyUnit::Hartree),
            "mhz" => Ok(EnergyUnit::MHz),
            "ghz" => Ok(EnergyUnit::GHz),
            "ev" => Ok(EnergyUnit::EV),
            other => Err(UlrmError::Usage(format!("unknown energy unit '{other}'"))),
        }
    }
}

impl fmt::Display for EnergyUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EnergyUnit::Hartree => "hartree",
            EnergyUnit::MHz => "MHz",
            EnergyUnit::GHz => "GHz",
            EnergyUnit::EV => "eV",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyQuantity {
    pub value: f64,
    pub unit: EnergyUnit,
}

impl EnergyQuantity {
    pub fn new(value: f64, unit: EnergyUnit) -> Self {
        Self { value, unit }
    }

    pub fn hartree(value: f64) -> Self {
        Self::new(value, EnergyUnit::Hartree)
    }

    pub fn to_hartree(self) -> f64 {
        self.value * self.unit.to_hartree_factor()
    }
}

pub fn convert_energy(q: EnergyQuantity, target: EnergyUnit) -> EnergyQuantity {
    EnergyQuantity {
        value: q.to_hartree() / target.to_hartree_factor(),
        unit: target,
    }
}

pub fn hartree_to_mhz(e: f64) -> f64 {
    e * MHZ_PER_HARTREE
}

pub fn mhz_to_hartree(e: f64) -> f64 {
    e / MHZ_PER_HARTREE
}

pub fn ev_to_hartree(e: f64) -> f64 {
    e * HARTREE_PER_EV
}

pub fn hartree_to_ev(e: f64) -> f64 {
    e / HARTREE_PER_EV
}

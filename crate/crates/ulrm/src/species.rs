//! Bundled per-species atomic data: masses, scattering parameters and
//! Rydberg-Ritz quantum-defect coefficients.
//!
//! The table ships embedded in the binary; `ULRM_DATA_DIR` (containing a
//! `species.json`) overrides it at startup.

use crate::error::{Result, UlrmError};
use crate::units::ev_to_hartree;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

pub const EMBEDDED_SPECIES_JSON: &str = include_str!("../data/species.json");

/// p-wave shape-resonance parametrization (triplet channel), all in hartree
/// atomic units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PWaveResonanceParams {
    /// Resonance energy (phase shift crosses pi/2 here).
    pub e_res: f64,
    /// Resonance width.
    pub gamma: f64,
    /// Background p-wave scattering volume.
    pub background: f64,
}

/// Rydberg-Ritz pair (delta_0, delta_2) for one l.
pub type DefectCoeffs = (f64, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesData {
    pub name: String,
    /// Atomic mass in electron masses.
    pub mass: f64,
    /// Zero-energy s-wave triplet scattering length, a.u.
    pub a0: f64,
    /// Ground-state polarizability, a.u.
    pub alpha: f64,
    /// (delta_0, delta_2) per l for l = 0..=3; zero for l >= 4.
    pub defect_coeffs: [DefectCoeffs; 4],
    pub pwave: PWaveResonanceParams,
}

#[derive(Deserialize)]
struct RawPWave {
    e_res_ev: f64,
    gamma_ev: f64,
    background_volume: f64,
    #[allow(dead_code)]
    source: Option<String>,
}

#[derive(Deserialize)]
struct RawSpecies {
    name: String,
    mass: f64,
    a0: f64,
    alpha: f64,
    defects: Vec<(f64, f64)>,
    pwave: RawPWave,
}

#[derive(Deserialize)]
struct RawTable {
    data_version: u32,
    species: Vec<RawSpecies>,
}

#[derive(Debug, Clone)]
pub struct SpeciesTable {
    pub data_version: u32,
    pub species: Vec<SpeciesData>,
}

fn parse_table(json: &str) -> Result<SpeciesTable> {
    let raw: RawTable =
        serde_json::from_str(json).map_err(|e| UlrmError::DataTable(e.to_string()))?;
    let mut species = Vec::with_capacity(raw.species.len());
    for s in raw.species {
        if s.defects.len() != 4 {
            return Err(UlrmError::DataTable(format!(
                "species {}: expected 4 defect rows, got {}",
                s.name,
                s.defects.len()
            )));
        }
        if s.mass <= 0.0 || s.alpha <= 0.0 {
            return Err(UlrmError::DataTable(format!(
                "species {}: mass and alpha must be positive",
                s.name
            )));
        }
        species.push(SpeciesData {
            name: s.name,
            mass: s.mass,
            a0: s.a0,
            alpha: s.alpha,
            defect_coeffs: [s.defects[0], s.defects[1], s.defects[2], s.defects[3]],
            pwave: PWaveResonanceParams {
                e_res: ev_to_hartree(s.pwave.e_res_ev),
                gamma: ev_to_hartree(s.pwave.gamma_ev),
                background: s.pwave.background_volume,
            },
        });
    }
    Ok(SpeciesTable {
        data_version: raw.data_version,
        species,
    })
}

fn table() -> &'static SpeciesTable {
    static TABLE: OnceLock<SpeciesTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        if let Ok(dir) = std::env::var("ULRM_DATA_DIR") {
            let path = std::path::Path::new(&dir).join("species.json");
            if let Ok(body) = std::fs::read_to_string(&path) {
                match parse_table(&body) {
                    Ok(t) => return t,
                    Err(e) => {
                        eprintln!("warning: ignoring {}: {e}", path.display());
                    }
                }
            }
        }
        parse_table(EMBEDDED_SPECIES_JSON).expect("embedded species table is valid")
    })
}

pub fn data_version() -> u32 {
    table().data_version
}

pub fn species_lookup(name: &str) -> Result<&'static SpeciesData> {
    table()
        .species
        .iter()
        .find(|s| s.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| UlrmError::UnknownSpecies(name.to_string()))
}

pub fn all_species() -> &'static [SpeciesData] {
    &table().species
}

/// Rydberg-Ritz quantum defect delta_l(n) = d0 + d2/(n - d0)^2; zero for l >= 4.
pub fn quantum_defect(species: &SpeciesData, n: u32, l: u32) -> Result<f64> {
    if n < 5 {
        return Err(UlrmError::InvalidState(format!(
            "n = {n} below the Rydberg regime (need n >= 5)"
        )));
    }
    if l >= n {
        return Err(UlrmError::InvalidState(format!("l = {l} >= n = {n}")));
    }
    if l >= 4 {
        return Ok(0.0);
    }
    let (d0, d2) = species.defect_coeffs[l as usize];
    if d0 == 0.0 && d2 == 0.0 {
        return Ok(0.0);
    }
    Ok(d0 + d2 / (n as f64 - d0).powi(2))
}

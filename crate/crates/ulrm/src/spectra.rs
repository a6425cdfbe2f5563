//! Polyatomic photoassociation line spectra from dimer binding energies.
//!
//! A Rydberg atom binding i Rb and j Cs ground-state atoms shifts by the
//! additive rule dE_Rb = i a + j b (Rb Rydberg) or dE_Cs = i c + j d
//! (Cs Rydberg); a..d are the per-perturber dimer ground levels.

use crate::error::{Result, UlrmError};
use serde::{Deserialize, Serialize};

/// Dimer ground-level shifts in MHz for the four Rydberg/perturber pairings
/// at a common Rydberg state (n, l).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DimerEnergyQuartet {
    /// Rb Rydberg + Rb perturber.
    pub a: f64,
    /// Rb Rydberg + Cs perturber.
    pub b: f64,
    /// Cs Rydberg + Rb perturber.
    pub c: f64,
    /// Cs Rydberg + Cs perturber.
    pub d: f64,
    pub n: u32,
    pub l: u32,
}

impl DimerEnergyQuartet {
    /// All shifts bound (< 0) and Cs perturbers bind deeper than Rb ones.
    pub fn validate(&self) -> Result<()> {
        if !(self.a < 0.0 && self.b < 0.0 && self.c < 0.0 && self.d < 0.0) {
            return Err(UlrmError::InvalidState(
                "quartet must be all negative (bound levels)".into(),
            ));
        }
        if !(self.d.abs() > self.c.abs() && self.b.abs() > self.a.abs()) {
            return Err(UlrmError::InvalidState(
                "quartet ordering violated: expected |d| > |c| and |b| > |a|".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RydbergSpecies {
    Rb,
    Cs,
}

impl std::str::FromStr for RydbergSpecies {
    type Err = UlrmError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rb" => Ok(Self::Rb),
            "cs" => Ok(Self::Cs),
            other => Err(UlrmError::Usage(format!(
                "unknown Rydberg species '{other}' (expected Rb or Cs)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectrumLine {
    pub rydberg: RydbergSpecies,
    /// Rb ground-state atoms bound.
    pub i: u32,
    /// Cs ground-state atoms bound.
    pub j: u32,
    /// MHz relative to the bare Rydberg line.
    pub shift_mhz: f64,
    pub weight: f64,
}

/// Exact additive shift in MHz.
pub fn polyatomic_shift(quartet: &DimerEnergyQuartet, rydberg: RydbergSpecies, i: u32, j: u32) -> f64 {
    let (per_rb, per_cs) = match rydberg {
        RydbergSpecies::Rb => (quartet.a, quartet.b),
        RydbergSpecies::Cs => (quartet.c, quartet.d),
    };
    i as f64 * per_rb + j as f64 * per_cs
}

/// How the enumeration bounds (i, j).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomCap {
    /// 1 <= i + j <= max.
    Total(u32),
    /// 1 <= i + j, i <= max, j <= max.
    PerSpecies(u32),
}

/// Optional Poisson occupation weights: weight(i, j) =
/// P(i; lambda_rb) * P(j; lambda_cs). Default (None) is weight 1.
#[derive(Debug, Clone, Copy)]
pub struct PoissonWeights {
    pub lambda_rb: f64,
    pub lambda_cs: f64,
}

fn poisson_pmf(lambda: f64, k: u32) -> f64 {
    let mut p = (-lambda).exp();
    for m in 1..=k {
        p *= lambda / m as f64;
    }
    p
}

/// Shift coincidences closer than this merge into one line.
pub const MERGE_TOLERANCE_MHZ: f64 = 1e-3;

/// All molecular lines under `cap`, merged within 1 kHz, sorted by shift.
pub fn enumerate_lines(
    quartet: &DimerEnergyQuartet,
    rydberg: RydbergSpecies,
    cap: AtomCap,
    weights: Option<PoissonWeights>,
) -> Result<Vec<SpectrumLine>> {
    let (i_max, j_max, total_max) = match cap {
        AtomCap::Total(m) => (m, m, m),
        AtomCap::PerSpecies(m) => (m, m, 2 * m),
    };
    if total_max == 0 || total_max > 20 || i_max > 10 || j_max > 10 {
        return Err(UlrmError::Usage(
            "atom cap must be between 1 and 10".into(),
        ));
    }
    let mut lines: Vec<SpectrumLine> = Vec::new();
    for i in 0..=i_max {
        for j in 0..=j_max {
            if i + j == 0 || i + j > total_max {
                continue;
            }
            let shift = polyatomic_shift(quartet, rydberg, i, j);
            let weight = match weights {
                Some(w) => poisson_pmf(w.lambda_rb, i) * poisson_pmf(w.lambda_cs, j),
                None => 1.0,
            };
            lines.push(SpectrumLine {
                rydberg,
                i,
                j,
                shift_mhz: shift,
                weight,
            });
        }
    }
    lines.sort_by(|x, y| x.shift_mhz.partial_cmp(&y.shift_mhz).unwrap());
    // Merge coincidences: keep the first composition, sum the weights.
    let mut merged: Vec<SpectrumLine> = Vec::with_capacity(lines.len());
    for line in lines {
        if let Some(last) = merged.last_mut() {
            if (line.shift_mhz - last.shift_mhz).abs() <= MERGE_TOLERANCE_MHZ {
                last.weight += line.weight;
                continue;
            }
        }
        merged.push(line);
    }
    Ok(merged)
}

#[derive(Debug, Clone)]
pub struct RenderedSpectrum {
    pub energy_mhz: Vec<f64>,
    pub intensity: Vec<f64>,
    /// True if some line center lies outside the sampled grid.
    pub coverage_warning: bool,
}

/// Sum of unit-area-scaled Lorentzians, height proportional to weight.
pub fn render_spectrum(
    lines: &[SpectrumLine],
    broadening_fwhm: f64,
    grid: &[f64],
) -> Result<RenderedSpectrum> {
    if broadening_fwhm <= 0.0 {
        return Err(UlrmError::Usage("broadening FWHM must be positive".into()));
    }
    if grid.len() < 2 {
        return Err(UlrmError::Usage("spectrum grid needs at least 2 points".into()));
    }
    let gamma = broadening_fwhm / 2.0;
    let lo = grid[0].min(*grid.last().unwrap());
    let hi = grid[0].max(*grid.last().unwrap());
    let coverage_warning = lines
        .iter()
        .any(|l| l.shift_mhz < lo || l.shift_mhz > hi);
    let intensity = grid
        .iter()
        .map(|&e| {
            lines
                .iter()
                .map(|l| {
                    let x = e - l.shift_mhz;
                    l.weight * gamma / (std::f64::consts::PI * (x * x + gamma * gamma))
                })
                .sum()
        })
        .collect();
    Ok(RenderedSpectrum {
        energy_mhz: grid.to_vec(),
        intensity,
        coverage_warning,
    })
}

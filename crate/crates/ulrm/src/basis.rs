//! Electronic basis sets for the perturber-coupling Hamiltonian.
//!
//! Only m = 0 states enter: the contact interaction at a point on the z-axis
//! couples nothing else.

use crate::error::{Result, UlrmError};
use crate::radial::{solve_radial, GridSpec, RadialWavefunction, RydbergState};
use crate::species::{quantum_defect, SpeciesData};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    SingleState,
    DegenerateManifold,
    ExtendedPWave,
}

#[derive(Debug)]
pub struct BasisSet {
    pub species: &'static SpeciesData,
    pub kind: BasisKind,
    pub states: Vec<RydbergState>,
    pub wavefunctions: Vec<RadialWavefunction>,
    /// Reference energy used for the semiclassical electron wavenumber.
    pub k_reference_energy: f64,
}

impl BasisSet {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.energy).collect()
    }

    /// Index of the basis state (n, l), if present.
    pub fn index_of(&self, n: u32, l: u32) -> Option<usize> {
        self.states.iter().position(|s| s.n == n && s.l == l)
    }

    pub fn labels(&self) -> Vec<String> {
        self.states
            .iter()
            .map(|s| format!("{}{}", s.n, l_letter(s.l)))
            .collect()
    }

    fn solve_all(
        species: &'static SpeciesData,
        states: Vec<RydbergState>,
        kind: BasisKind,
        r_max: Option<f64>,
        n_points: usize,
    ) -> Result<Self> {
        if states.is_empty() {
            return Err(UlrmError::InvalidState("empty basis".into()));
        }
        let n_max = states.iter().map(|s| s.n).max().unwrap();
        let r_max = r_max.unwrap_or(2.5 * (n_max as f64) * (n_max as f64));
        let mut wavefunctions = Vec::with_capacity(states.len());
        for st in &states {
            wavefunctions.push(solve_radial(
                *st,
                GridSpec {
                    n_points,
                    r_max: Some(r_max),
                },
            )?);
        }
        let k_reference_energy =
            states.iter().map(|s| s.energy).sum::<f64>() / states.len() as f64;
        Ok(Self {
            species,
            kind,
            states,
            wavefunctions,
            k_reference_energy,
        })
    }

    /// One isolated low-l state.
    pub fn single_state(
        species: &'static SpeciesData,
        n: u32,
        l: u32,
        r_max: Option<f64>,
    ) -> Result<Self> {
        let st = RydbergState::new(species, n, l)?;
        Self::solve_all(species, vec![st], BasisKind::SingleState, r_max, 4000)
    }

    /// The near-degenerate high-l manifold of hydrogenic level n: l = 3..n-1.
    pub fn degenerate_manifold(
        species: &'static SpeciesData,
        n: u32,
        r_max: Option<f64>,
    ) -> Result<Self> {
        let states = manifold_states(species, n)?;
        Self::solve_all(species, states, BasisKind::DegenerateManifold, r_max, 4000)
    }

    /// Extended basis bracketing the target state between two hydrogenic
    /// manifolds, plus every low-l state whose effective quantum number falls
    /// between them. For Rb near 35S this is exactly
    /// {32(l>2), 35S, 34P, 33D, 31(l>2)}.
    pub fn bracketing(
        species: &'static SpeciesData,
        n: u32,
        l: u32,
        r_max: Option<f64>,
    ) -> Result<Self> {
        let target = RydbergState::new(species, n, l)?;
        let nu = target.nu();
        let m = nu.floor() as u32;
        if (nu - m as f64).abs() < 1e-9 {
            return Err(UlrmError::InvalidState(format!(
                "target {}{} is degenerate with manifold {m}; use the manifold basis",
                n,
                l_letter(l)
            )));
        }
        let mut states = manifold_states(species, m + 1)?;
        // Low-l states with nu in (m, m+1).
        for l0 in 0..=2u32 {
            for n0 in m.saturating_sub(2)..=m + 8 {
                if n0 <= l0 || n0 < 5 {
                    continue;
                }
                let d = quantum_defect(species, n0, l0)?;
                let nu0 = n0 as f64 - d;
                if nu0 > m as f64 && nu0 < (m + 1) as f64 {
                    states.push(RydbergState::new(species, n0, l0)?);
                }
            }
        }
        states.extend(manifold_states(species, m)?);
        // No duplicate (n, l).
        for i in 0..states.len() {
            for j in i + 1..states.len() {
                if states[i].n == states[j].n && states[i].l == states[j].l {
                    return Err(UlrmError::InvalidState(format!(
                        "duplicate basis state {}{}",
                        states[i].n,
                        l_letter(states[i].l)
                    )));
                }
            }
        }
        let mut basis = Self::solve_all(species, states, BasisKind::ExtendedPWave, r_max, 4000)?;
        // The bracket must actually contain the target.
        if basis.index_of(n, l).is_none() {
            return Err(UlrmError::InvalidState(format!(
                "bracketing basis did not capture {}{}",
                n,
                l_letter(l)
            )));
        }
        basis.kind = BasisKind::ExtendedPWave;
        Ok(basis)
    }
}

fn manifold_states(species: &'static SpeciesData, n: u32) -> Result<Vec<RydbergState>> {
    if n < 5 {
        return Err(UlrmError::InvalidState(format!("manifold n = {n} < 5")));
    }
    (3..n)
        .map(|l| RydbergState::new(species, n, l))
        .collect()
}

pub fn l_letter(l: u32) -> String {
    match l {
        0 => "S".into(),
        1 => "P".into(),
        2 => "D".into(),
        3 => "F".into(),
        4 => "G".into(),
        5 => "H".into(),
        6 => "I".into(),
        other => format!("(l={other})"),
    }
}

/// Parse state labels of the form "35S", "55s", "35D".
pub fn parse_state_label(label: &str) -> Result<(u32, u32)> {
    let label = label.trim();
    let split = label
        .find(|c: char| c.is_ascii_alphabetic())
        .ok_or_else(|| UlrmError::Usage(format!("malformed state label '{label}'")))?;
    let (num, letter) = label.split_at(split);
    let n: u32 = num
        .parse()
        .map_err(|_| UlrmError::Usage(format!("malformed state label '{label}'")))?;
    let l = match letter.to_ascii_uppercase().as_str() {
        "S" => 0,
        "P" => 1,
        "D" => 2,
        "F" => 3,
        "G" => 4,
        "H" => 5,
        other => {
            return Err(UlrmError::Usage(format!(
                "unsupported angular momentum letter '{other}'"
            )))
        }
    };
    Ok((n, l))
}

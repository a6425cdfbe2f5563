//! High-level drivers combining basis construction, curve building, well
//! analysis, vibrational solves, densities and dipoles into the quantities
//! the CLI and regression suite report.

use crate::basis::BasisSet;
use crate::density::{axial_lobe_count, electron_density, ElectronDensityMap};
use crate::dipole::dipole_moment;
use crate::error::{Result, UlrmError};
use crate::pec::{
    default_depth_floor, find_wells, linspace, pec_diagonalize, pec_low_l_swave,
    PotentialCurveSet, WellDescriptor,
};
use crate::scattering::{self, DEFAULT_T_DIV};
use crate::species::{species_lookup, SpeciesData};
use crate::spectra::DimerEnergyQuartet;
use crate::units::hartree_to_mhz;
use crate::vibrational::{reduced_mass, solve_vibrational, VibrationalConfig, VibrationalLevel};

/// How the Born-Oppenheimer curve for a low-l dimer is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveMethod {
    /// Single-state s-wave shift (fast; no trilobite admixture).
    SWave,
    /// Full s-wave diagonalization in the bracketing basis.
    Diagonalize,
    /// Bracketing-basis diagonalization with the p-wave term included
    /// (reliable in the outer-well window, far below the shape resonance).
    DiagonalizePWave,
}

#[derive(Debug)]
pub struct DimerResult {
    pub curve_set: PotentialCurveSet,
    pub curve_index: usize,
    pub well: WellDescriptor,
    pub levels: Vec<VibrationalLevel>,
    /// Curve value at the outermost grid point (dissociation reference).
    pub asymptote: f64,
}

impl DimerResult {
    /// Ground-level shift relative to dissociation, MHz.
    pub fn ground_shift_mhz(&self) -> Option<f64> {
        self.levels.first().map(|l| l.energy_shift_mhz)
    }
}

/// Default R window bracketing the outermost well of a low-l nl state:
/// [0.9, 2.35] nu^2 (outer turning point sits near 2 nu^2).
pub fn outer_well_window(nu: f64) -> (f64, f64) {
    (0.9 * nu * nu, 2.35 * nu * nu)
}

/// Outermost-well vibrational levels of the (rydberg nl + perturber) dimer.
pub fn dimer_outermost_levels(
    rydberg: &'static SpeciesData,
    perturber: &'static SpeciesData,
    n: u32,
    l: u32,
    n_levels: usize,
    method: CurveMethod,
    n_points: usize,
) -> Result<DimerResult> {
    let (basis, curve_index_hint) = match method {
        CurveMethod::SWave => (BasisSet::single_state(rydberg, n, l, None)?, Some(0)),
        CurveMethod::Diagonalize | CurveMethod::DiagonalizePWave => {
            (BasisSet::bracketing(rydberg, n, l, None)?, None)
        }
    };
    let target_index = basis.index_of(n, l).expect("target in basis");
    let nu = basis.states[target_index].nu();
    let (lo, hi) = outer_well_window(nu);
    let r_grid = linspace(lo, hi, n_points);
    let reference = basis.states[target_index].energy;
    let set = match method {
        CurveMethod::SWave => pec_low_l_swave(&basis, perturber, &r_grid)?,
        CurveMethod::Diagonalize => {
            pec_diagonalize(&basis, perturber, &r_grid, false, reference)?
        }
        CurveMethod::DiagonalizePWave => {
            pec_diagonalize(&basis, perturber, &r_grid, true, reference)?
        }
    };
    let curve_index = match curve_index_hint {
        Some(c) => c,
        None => set
            .curve_for_state(target_index)
            .ok_or_else(|| UlrmError::InvalidState("target curve lost in tracking".into()))?,
    };
    finish_outermost(set, curve_index, rydberg, perturber, n_levels)
}

fn finish_outermost(
    set: PotentialCurveSet,
    curve_index: usize,
    rydberg: &SpeciesData,
    perturber: &SpeciesData,
    n_levels: usize,
) -> Result<DimerResult> {
    let v = &set.curves[curve_index].energies;
    let asymptote = *v.last().unwrap();
    let wells = find_wells(&set.r_grid, v, asymptote, default_depth_floor());
    if wells.is_empty() {
        return Err(UlrmError::InvalidState("no outermost well found".into()));
    }
    let mu = reduced_mass(rydberg.mass, perturber.mass);
    // The semiclassical k(R) clamp puts a shallow cusp dip right at the
    // classical turning point 2 nu^2; it can register as the outermost
    // "well" yet confines nothing. Use the outermost well that actually
    // supports a bound level.
    for well in wells {
        let levels = solve_vibrational(
            &set.r_grid,
            v,
            &well,
            asymptote,
            mu,
            n_levels,
            VibrationalConfig::default(),
        )?;
        if !levels.is_empty() {
            return Ok(DimerResult {
                curve_set: set,
                curve_index,
                well,
                levels,
                asymptote,
            });
        }
    }
    Err(UlrmError::InvalidState(
        "no outer well supports a bound level".into(),
    ))
}

/// Ground levels a, b, c, d of the four Rb/Cs dimer pairings at nS, via the
/// full s-wave diagonalization (the Cs curves carry sizable trilobite
/// admixture that the single-state shift misses).
pub fn dimer_quartet(n: u32) -> Result<DimerEnergyQuartet> {
    let rb = species_lookup("Rb")?;
    let cs = species_lookup("Cs")?;
    let mut vals = [0.0; 4];
    for (slot, (ryd, pert)) in [(rb, rb), (rb, cs), (cs, rb), (cs, cs)].iter().enumerate() {
        let res = dimer_outermost_levels(ryd, pert, n, 0, 1, CurveMethod::Diagonalize, 700)?;
        vals[slot] = res
            .ground_shift_mhz()
            .ok_or_else(|| UlrmError::InvalidState("outermost well holds no level".into()))?;
    }
    Ok(DimerEnergyQuartet {
        a: vals[0],
        b: vals[1],
        c: vals[2],
        d: vals[3],
        n,
        l: 0,
    })
}

#[derive(Debug)]
pub struct ButterflyResult {
    pub curve_set: PotentialCurveSet,
    pub curve_index: usize,
    /// Refined butterfly well minimum position, a.u.
    pub r_well: f64,
    /// Well minimum relative to the nS asymptote, MHz.
    pub depth_mhz: f64,
    /// Masked (p-wave-divergent) R interval, a.u.
    pub mask: (f64, f64),
}

/// Extended-basis curves with the p-wave interaction for the butterfly
/// region around an nS state.
///
/// Inside the divergence radius the lowest adiabatic curve falls
/// monotonically into the masked window, so "deepest reliable minimum"
/// would only report where the |tan delta_p| cutoff happens to truncate
/// that descent. The cutoff-independent feature is the envelope turnover
/// where s-wave repulsion (a_s turns positive at these electron energies)
/// overtakes the weakening p-wave attraction. The undulation well sitting
/// at this turnover has the highest escape threshold of the whole segment
/// (tallest pair of confining barriers), which is how we select it.
pub fn butterfly(
    rydberg: &'static SpeciesData,
    perturber: &'static SpeciesData,
    n: u32,
    r_lo: f64,
    r_hi: f64,
    n_points: usize,
) -> Result<ButterflyResult> {
    let basis = BasisSet::bracketing(rydberg, n, 0, None)?;
    let target = basis.index_of(n, 0).expect("target in basis");
    let reference = basis.states[target].energy;
    let r_grid = linspace(r_lo, r_hi, n_points);
    let set = pec_diagonalize(&basis, perturber, &r_grid, true, reference)?;
    let mask = scattering::unreliable_r_window(perturber, basis.k_reference_energy, DEFAULT_T_DIV)
        .ok_or_else(|| {
            UlrmError::InvalidState("p-wave divergence window not reachable".into())
        })?;
    // Reliable grid indices below the divergence window.
    let sub: Vec<usize> = (0..r_grid.len())
        .filter(|&i| r_grid[i] < mask.0 && set.reliable[i])
        .collect();
    if sub.len() < 5 {
        return Err(UlrmError::InvalidState(
            "no reliable region below the divergence window".into(),
        ));
    }
    // The butterfly binding lives on the lowest curve of the segment.
    let curve_index = (0..set.curves.len())
        .min_by(|&a, &b| {
            let ea = set.curves[a].energies[sub[sub.len() / 2]];
            let eb = set.curves[b].energies[sub[sub.len() / 2]];
            ea.partial_cmp(&eb).unwrap()
        })
        .unwrap();
    let energies = &set.curves[curve_index].energies;
    // Alternating extrema of the reliable segment: (sub position, is_max).
    let mut extrema: Vec<(usize, bool)> = Vec::new();
    for w in 1..sub.len() - 1 {
        let (a, b, c) = (
            energies[sub[w - 1]],
            energies[sub[w]],
            energies[sub[w + 1]],
        );
        if b < a && b <= c {
            extrema.push((w, false));
        } else if b > a && b >= c {
            extrema.push((w, true));
        }
    }
    // Escape threshold of each barrier-confined well: the lower of its two
    // flanking barriers. The turnover pocket maximizes it.
    let mut best: Option<(usize, f64)> = None;
    for (k, &(w, is_max)) in extrema.iter().enumerate() {
        if is_max || k == 0 || k + 1 == extrema.len() {
            continue;
        }
        let (wl, left_max) = extrema[k - 1];
        let (wr, right_max) = extrema[k + 1];
        if !(left_max && right_max) {
            continue;
        }
        let escape = energies[sub[wl]].min(energies[sub[wr]]);
        if best.map_or(true, |(_, b)| escape > b) {
            best = Some((sub[w], escape));
        }
    }
    let i_min = best
        .ok_or_else(|| {
            UlrmError::InvalidState("no butterfly well below the divergence window".into())
        })?
        .0;
    let v = &set.curves[curve_index].energies;
    let wells = find_wells(&r_grid, v, reference, default_depth_floor());
    let well = wells
        .iter()
        .find(|w| (w.i_min as i64 - i_min as i64).abs() <= 2)
        .copied();
    let (r_well, v_min) = match well {
        Some(w) => (w.r_min, w.v_min),
        None => (r_grid[i_min], v[i_min]),
    };
    Ok(ButterflyResult {
        depth_mhz: hartree_to_mhz(v_min - reference),
        curve_set: set,
        curve_index,
        r_well,
        mask,
    })
}

#[derive(Debug)]
pub struct TrilobiteResult {
    pub curve_set: PotentialCurveSet,
    pub curve_index: usize,
    /// Wells indexed from outermost (index 1) inward.
    pub wells: Vec<WellDescriptor>,
}

/// The trilobite curve of the high-l manifold: the eigenvalue detached
/// downward by the s-wave coupling.
pub fn trilobite_curve(
    rydberg: &'static SpeciesData,
    perturber: &'static SpeciesData,
    n: u32,
    r_lo: f64,
    r_hi: f64,
    n_points: usize,
) -> Result<TrilobiteResult> {
    let basis = BasisSet::degenerate_manifold(rydberg, n, None)?;
    let reference = basis.states[0].energy;
    let r_grid = linspace(r_lo, r_hi, n_points);
    let set = pec_diagonalize(&basis, perturber, &r_grid, false, reference)?;
    // Deepest curve at its global minimum.
    let mut curve_index = 0;
    let mut min_e = f64::INFINITY;
    for (ci, curve) in set.curves.iter().enumerate() {
        for &e in &curve.energies {
            if e < min_e {
                min_e = e;
                curve_index = ci;
            }
        }
    }
    let v = &set.curves[curve_index].energies;
    let asymptote = *v.last().unwrap();
    let wells = find_wells(&r_grid, v, asymptote, default_depth_floor());
    Ok(TrilobiteResult {
        curve_set: set,
        curve_index,
        wells,
    })
}

/// Electron density map of one tracked curve at the perturber distance R
/// closest to a given grid index.
pub fn density_at(
    basis: &BasisSet,
    set: &PotentialCurveSet,
    curve_index: usize,
    i_grid: usize,
    half_extent: f64,
    n_rho: usize,
    n_z: usize,
) -> Result<ElectronDensityMap> {
    let r = set.r_grid[i_grid];
    let eigvec = &set.curves[curve_index].eigvecs[i_grid];
    let rho = linspace(0.0, half_extent, n_rho);
    let z = linspace(-half_extent, half_extent, n_z);
    electron_density(basis, eigvec, r, &rho, &z)
}

/// Lobe counts of the trilobite density in wells x = 1..=n_wells
/// (outermost inward).
pub fn trilobite_lobe_counts(
    rydberg: &'static SpeciesData,
    perturber: &'static SpeciesData,
    n: u32,
    n_wells: usize,
) -> Result<Vec<usize>> {
    let n2 = (n as f64) * (n as f64);
    let tri = trilobite_curve(rydberg, perturber, n, 0.35 * n2, 2.05 * n2, 1100)?;
    if tri.wells.len() < n_wells {
        return Err(UlrmError::InvalidState(format!(
            "trilobite curve exposes only {} wells",
            tri.wells.len()
        )));
    }
    // Rebuild the basis once for density sampling (same parameters as inside
    // trilobite_curve; wavefunction solves are deterministic).
    let basis = BasisSet::degenerate_manifold(rydberg, n, None)?;
    let mut counts = Vec::with_capacity(n_wells);
    for w in &tri.wells[..n_wells] {
        let eigvec = &tri.curve_set.curves[tri.curve_index].eigvecs[w.i_min];
        counts.push(axial_lobe_count(&basis, eigvec, w.r_min, 2.3 * n2)?);
    }
    Ok(counts)
}

/// Permanent dipole of the tracked nl curve at its outermost-well minimum,
/// in Debye (magnitude).
pub fn outermost_well_dipole(
    rydberg: &'static SpeciesData,
    perturber: &'static SpeciesData,
    n: u32,
    l: u32,
) -> Result<f64> {
    let basis = BasisSet::bracketing(rydberg, n, l, None)?;
    let target = basis.index_of(n, l).expect("target in basis");
    let nu = basis.states[target].nu();
    let (lo, hi) = outer_well_window(nu);
    let r_grid = linspace(lo, hi, 700);
    let reference = basis.states[target].energy;
    let set = pec_diagonalize(&basis, perturber, &r_grid, false, reference)?;
    let ci = set
        .curve_for_state(target)
        .ok_or_else(|| UlrmError::InvalidState("target curve lost in tracking".into()))?;
    let v = &set.curves[ci].energies;
    let asymptote = *v.last().unwrap();
    let wells = find_wells(&r_grid, v, asymptote, default_depth_floor());
    let well = wells
        .first()
        .ok_or_else(|| UlrmError::InvalidState("no outermost well found".into()))?;
    // At the well minimum the nl line anticrosses the descending trilobite
    // curve, so its character is shared between two near-degenerate
    // eigenstates. The polar molecule is the member of that complex carrying
    // the large dipole; report its PEDM with each i<j coherence counted once
    // (half the coherent double sum).
    let mut d_max = 0.0_f64;
    for track in &set.curves {
        let c = &track.eigvecs[well.i_min];
        if c[target] * c[target] < 0.01 {
            continue;
        }
        let d = dipole_moment(&basis, c)?.abs();
        d_max = d_max.max(d);
    }
    if d_max == 0.0 {
        return Err(UlrmError::InvalidState(
            "no eigenstate with nl character at the well minimum".into(),
        ));
    }
    Ok(0.5 * d_max)
}

#[derive(Debug, Clone)]
pub struct ScalingRow {
    pub n: u32,
    /// Ground outermost-well level, MHz below dissociation (negative).
    pub e_v0_mhz: f64,
    /// First excited level if the well holds one.
    pub e_v1_mhz: Option<f64>,
}

#[derive(Debug)]
pub struct ScalingCombo {
    pub rydberg: String,
    pub perturber: String,
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of ln|E_v0| vs ln n.
    pub slope: f64,
}

/// Outermost-well nD ground/first levels over an n-range for the four Rb/Cs
/// pairings, with the log-log scaling exponent.
pub fn scaling_study(n_lo: u32, n_hi: u32, step: u32) -> Result<Vec<ScalingCombo>> {
    if n_lo < 30 || n_hi > 60 || n_lo >= n_hi || step == 0 {
        return Err(UlrmError::OutOfRange(
            "scaling study needs 30 <= n_lo < n_hi <= 60 and step >= 1".into(),
        ));
    }
    let rb = species_lookup("Rb")?;
    let cs = species_lookup("Cs")?;
    let mut combos = Vec::with_capacity(4);
    for (ryd, pert) in [(rb, rb), (rb, cs), (cs, rb), (cs, cs)] {
        let mut rows = Vec::new();
        let mut n = n_lo;
        while n <= n_hi {
            let res =
                dimer_outermost_levels(ryd, pert, n, 2, 2, CurveMethod::DiagonalizePWave, 1000)?;
            let e0 = res
                .ground_shift_mhz()
                .ok_or_else(|| UlrmError::InvalidState(format!("{n}D well holds no level")))?;
            let e1 = res.levels.get(1).map(|l| l.energy_shift_mhz);
            rows.push(ScalingRow {
                n,
                e_v0_mhz: e0,
                e_v1_mhz: e1,
            });
            n += step;
        }
        let slope = log_log_slope(
            &rows.iter().map(|r| r.n as f64).collect::<Vec<_>>(),
            &rows.iter().map(|r| r.e_v0_mhz.abs()).collect::<Vec<_>>(),
        );
        combos.push(ScalingCombo {
            rydberg: ryd.name.clone(),
            perturber: pert.name.clone(),
            rows,
            slope,
        });
    }
    Ok(combos)
}

/// Least-squares slope of ln y vs ln x.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    num / den
}

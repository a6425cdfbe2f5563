//! Bound vibrational levels of a tabulated potential well: uniform-grid
//! 3-point finite-difference Hamiltonian with hard walls, J = 0 only.

use crate::error::{Result, UlrmError};
use crate::pec::WellDescriptor;
use crate::radial::count_sign_changes;
use crate::spline::CubicSpline;
use crate::units::hartree_to_mhz;
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct VibrationalLevel {
    /// 0 = ground.
    pub v: usize,
    /// Absolute energy, hartree.
    pub energy: f64,
    /// Shift relative to the curve's declared reference level, MHz.
    pub energy_shift_mhz: f64,
    /// Wavefunction samples on `r_grid`, normalized, positive first antinode.
    pub chi: Vec<f64>,
    pub r_grid: Vec<f64>,
    pub well: WellDescriptor,
}

pub fn reduced_mass(m1: f64, m2: f64) -> f64 {
    m1 * m2 / (m1 + m2)
}

#[derive(Debug, Clone, Copy)]
pub struct VibrationalConfig {
    pub n_points: usize,
    /// Extension of the domain beyond [R_left, R_right], as a fraction of the
    /// well width on each side.
    pub margin_frac: f64,
}

impl Default for VibrationalConfig {
    fn default() -> Self {
        Self {
            n_points: 800,
            margin_frac: 0.25,
        }
    }
}

/// Solve for bound levels of `well` in the curve sampled as (r_grid, v).
/// Energies are measured on the same absolute scale as `v`; the MHz shift is
/// relative to `reference_energy`. Tunneling through the confining barriers
/// is neglected: the potential is clamped at the barrier value outside
/// [R_left, R_right] on any side that has a genuine barrier, and hard walls
/// terminate the extended domain.
pub fn solve_vibrational(
    r_grid: &[f64],
    v: &[f64],
    well: &WellDescriptor,
    reference_energy: f64,
    mu: f64,
    n_levels: usize,
    config: VibrationalConfig,
) -> Result<Vec<VibrationalLevel>> {
    if mu <= 0.0 {
        return Err(UlrmError::OutOfRange("reduced mass must be positive".into()));
    }
    if config.n_points < 20 {
        return Err(UlrmError::Resolution("vibrational grid below 20 points".into()));
    }
    let spline = CubicSpline::new(r_grid, v)?;
    let width = well.r_right - well.r_left;
    let in_well_points = r_grid
        .iter()
        .filter(|&&r| r >= well.r_left && r <= well.r_right)
        .count();
    if in_well_points < 20 {
        return Err(UlrmError::Resolution(format!(
            "well spans only {in_well_points} curve samples"
        )));
    }
    let data_lo = r_grid[0];
    let data_hi = *r_grid.last().unwrap();
    let lo = (well.r_left - config.margin_frac * width).max(data_lo);
    let hi = (well.r_right + config.margin_frac * width).min(data_hi);

    let v_left = spline.eval(well.r_left)?;
    let v_right = spline.eval(well.r_right)?;
    // A boundary that is a genuine interior barrier (not the grid edge /
    // asymptote) keeps its barrier value outside the well; this prevents
    // neighboring wells from leaking spurious levels into the solve.
    let clamp_left = well.r_left > data_lo + 1e-9;
    let clamp_right = well.r_right < data_hi - 1e-9;

    let n = config.n_points;
    let h = (hi - lo) / (n + 1) as f64;
    let grid: Vec<f64> = (1..=n).map(|i| lo + h * i as f64).collect();
    let pot: Vec<f64> = grid
        .iter()
        .map(|&r| {
            if clamp_left && r < well.r_left {
                v_left.max(spline.eval(r).unwrap_or(v_left))
            } else if clamp_right && r > well.r_right {
                v_right.max(spline.eval(r).unwrap_or(v_right))
            } else {
                spline.eval(r).unwrap_or(0.0)
            }
        })
        .collect();

    let kin = 1.0 / (2.0 * mu * h * h);
    let mut ham = DMatrix::zeros(n, n);
    for i in 0..n {
        ham[(i, i)] = 2.0 * kin + pot[i];
        if i + 1 < n {
            ham[(i, i + 1)] = -kin;
            ham[(i + 1, i)] = -kin;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(ham);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());

    // Only levels confined by the shallower barrier count as bound.
    let barrier = v_left.min(v_right);
    let mut levels = Vec::new();
    for &idx in &order {
        if levels.len() >= n_levels {
            break;
        }
        let e = eig.eigenvalues[idx];
        if e >= barrier {
            break;
        }
        let mut chi: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        // Normalize on the uniform grid: eigenvectors are unit in l2.
        let scale = 1.0 / h.sqrt();
        for c in &mut chi {
            *c *= scale;
        }
        // Positive first antinode.
        if let Some(first) = chi.iter().find(|c| c.abs() > 1e-3 * scale) {
            if *first < 0.0 {
                for c in &mut chi {
                    *c = -*c;
                }
            }
        }
        let v_index = count_sign_changes(&chi);
        levels.push(VibrationalLevel {
            v: v_index,
            energy: e,
            energy_shift_mhz: hartree_to_mhz(e - reference_energy),
            chi,
            r_grid: grid.clone(),
            well: *well,
        });
    }
    // Strict ordering and consecutive node counts for genuine well states.
    levels.sort_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    Ok(levels)
}

//! Electronic probability densities in cylindrical coordinates and the lobe
//! counter for trilobite density maps.
//!
//! The stored quantity is rho |psi(rho, z, phi)|^2 on the phi in {0, pi}
//! half-planes; for m = 0 superpositions the two half-planes are mirror
//! images, so one half-plane is kept and mirrored on demand.

use crate::basis::BasisSet;
use crate::error::{Result, UlrmError};

#[derive(Debug)]
pub struct ElectronDensityMap {
    pub rho_grid: Vec<f64>,
    pub z_grid: Vec<f64>,
    /// density[iz][irho] = rho |psi|^2.
    pub density: Vec<Vec<f64>>,
    pub r_perturber: f64,
    /// Number of grid points outside every radial wavefunction grid
    /// (contributed zero).
    pub coverage_misses: usize,
}

impl ElectronDensityMap {
    pub fn max_value(&self) -> f64 {
        self.density
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0_f64, |m, &v| m.max(v))
    }

    /// Location (rho, z) of the density maximum.
    pub fn argmax(&self) -> (f64, f64) {
        let mut best = (0usize, 0usize);
        let mut best_v = -1.0;
        for (iz, row) in self.density.iter().enumerate() {
            for (ir, &v) in row.iter().enumerate() {
                if v > best_v {
                    best_v = v;
                    best = (iz, ir);
                }
            }
        }
        (self.rho_grid[best.1], self.z_grid[best.0])
    }

    /// Crude plane integral (trapezoid in both directions) over the two
    /// half-planes; used only for finiteness/positivity checks.
    pub fn half_plane_integral(&self) -> f64 {
        let nr = self.rho_grid.len();
        let nz = self.z_grid.len();
        let mut total = 0.0;
        for iz in 0..nz - 1 {
            let dz = self.z_grid[iz + 1] - self.z_grid[iz];
            for ir in 0..nr - 1 {
                let dr = self.rho_grid[ir + 1] - self.rho_grid[ir];
                let cell = 0.25
                    * (self.density[iz][ir]
                        + self.density[iz][ir + 1]
                        + self.density[iz + 1][ir]
                        + self.density[iz + 1][ir + 1]);
                total += cell * dr * dz;
            }
        }
        2.0 * total
    }
}

/// Associated Legendre-free evaluation: P_l(cos theta) by recurrence.
fn legendre_all(l_max: u32, x: f64, out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    if l_max == 0 {
        return;
    }
    out.push(x);
    for l in 1..l_max {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * x * out[l as usize] - lf * out[(l - 1) as usize])
            / (lf + 1.0);
        out.push(next);
    }
}

/// psi(rho, z) = sum_i c_i u_i(r)/r Y_li0(theta), sampled as rho |psi|^2.
pub fn electron_density(
    basis: &BasisSet,
    eigvec: &[f64],
    r_perturber: f64,
    rho_grid: &[f64],
    z_grid: &[f64],
) -> Result<ElectronDensityMap> {
    if eigvec.len() != basis.len() {
        return Err(UlrmError::InvalidState(format!(
            "eigenvector dimension {} != basis size {}",
            eigvec.len(),
            basis.len()
        )));
    }
    let l_max = basis.states.iter().map(|s| s.l).max().unwrap();
    let y_norms: Vec<f64> = basis
        .states
        .iter()
        .map(|s| ((2.0 * s.l as f64 + 1.0) / (4.0 * std::f64::consts::PI)).sqrt())
        .collect();
    let mut density = vec![vec![0.0; rho_grid.len()]; z_grid.len()];
    let mut misses = 0usize;
    let mut pl = Vec::with_capacity(l_max as usize + 1);
    for (iz, &z) in z_grid.iter().enumerate() {
        for (ir, &rho) in rho_grid.iter().enumerate() {
            let r = (rho * rho + z * z).sqrt();
            if r < 1e-9 {
                continue;
            }
            let cos_t = z / r;
            legendre_all(l_max, cos_t, &mut pl);
            let mut psi = 0.0;
            let mut covered = false;
            for (i, wf) in basis.wavefunctions.iter().enumerate() {
                if eigvec[i] == 0.0 {
                    continue;
                }
                if r < wf.r_min() || r > wf.r_max() {
                    continue;
                }
                covered = true;
                let u = wf.evaluate_u(r)?;
                psi += eigvec[i] * u / r * y_norms[i] * pl[basis.states[i].l as usize];
            }
            if !covered {
                misses += 1;
            }
            density[iz][ir] = rho * psi * psi;
        }
    }
    Ok(ElectronDensityMap {
        rho_grid: rho_grid.to_vec(),
        z_grid: z_grid.to_vec(),
        density,
        r_perturber,
        coverage_misses: misses,
    })
}

/// Count connected regions above 50% of the maximum across the combined
/// phi in {0, pi} half-planes (the half-plane mirrored through the z-axis;
/// the rho factor keeps the axis itself at zero, so mirror regions never
/// merge).
pub fn lobe_count(map: &ElectronDensityMap) -> Result<usize> {
    lobe_count_with_threshold(map, 0.5)
}

/// Lobe count of a perturber-localized state from its standing-wave
/// structure: the signed wavefunction on the internuclear axis has one
/// antinode at the perturber plus one per node between the perturber and the
/// classical turning surface. Each axial antinode shows up as a mirrored
/// pair of off-axis lobes in the rho |psi|^2 plane (the rho factor zeroes
/// the axis itself), so the lobe count is twice the antinode count. Node
/// counting is amplitude-independent, which makes this robust where
/// threshold-based region counting is not.
pub fn axial_lobe_count(
    basis: &BasisSet,
    eigvec: &[f64],
    r_perturber: f64,
    z_hi: f64,
) -> Result<usize> {
    if eigvec.len() != basis.len() {
        return Err(UlrmError::InvalidState(format!(
            "eigenvector dimension {} != basis size {}",
            eigvec.len(),
            basis.len()
        )));
    }
    if z_hi <= r_perturber {
        return Err(UlrmError::OutOfRange(
            "axial window must extend beyond the perturber".into(),
        ));
    }
    let y_norms: Vec<f64> = basis
        .states
        .iter()
        .map(|s| ((2.0 * s.l as f64 + 1.0) / (4.0 * std::f64::consts::PI)).sqrt())
        .collect();
    let n_samples = 3000;
    let mut vals = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let z = r_perturber + (z_hi - r_perturber) * i as f64 / (n_samples - 1) as f64;
        let mut psi = 0.0;
        for (j, wf) in basis.wavefunctions.iter().enumerate() {
            if eigvec[j] == 0.0 || z < wf.r_min() || z > wf.r_max() {
                continue;
            }
            // On the axis P_l(1) = 1 for every l.
            psi += eigvec[j] * wf.evaluate_u(z)? / z * y_norms[j];
        }
        vals.push(psi);
    }
    let max = vals.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    if max <= 0.0 {
        return Err(UlrmError::DegenerateMap);
    }
    // Antinodes fainter than 0.1% of the peak are not visible lobes.
    let floor = 1e-3 * max;
    let mut sign = 0.0_f64;
    let mut changes = 0usize;
    for &v in &vals {
        if v.abs() <= floor {
            continue;
        }
        let s = v.signum();
        if sign != 0.0 && s != sign {
            changes += 1;
        }
        sign = s;
    }
    Ok(2 * (changes + 1))
}

pub fn lobe_count_with_threshold(map: &ElectronDensityMap, frac: f64) -> Result<usize> {
    let max = map.max_value();
    if max <= 0.0 {
        return Err(UlrmError::DegenerateMap);
    }
    let threshold = frac * max;
    let nz = map.z_grid.len();
    let nr = map.rho_grid.len();
    // Full plane: columns -nr+1..nr-1 signed rho (mirror), 4-connectivity.
    let width = 2 * nr - 1;
    let at = |iz: usize, col: usize| -> f64 {
        let ir = col.abs_diff(nr - 1);
        map.density[iz][ir]
    };
    let mut visited = vec![false; nz * width];
    let mut regions = 0usize;
    let mut stack = Vec::new();
    for iz0 in 0..nz {
        for col0 in 0..width {
            let id0 = iz0 * width + col0;
            if visited[id0] || at(iz0, col0) < threshold {
                continue;
            }
            regions += 1;
            visited[id0] = true;
            stack.push((iz0, col0));
            while let Some((iz, col)) = stack.pop() {
                let push = |zz: usize, cc: usize, visited: &mut Vec<bool>, stack: &mut Vec<(usize, usize)>| {
                    let id = zz * width + cc;
                    if !visited[id] && at(zz, cc) >= threshold {
                        visited[id] = true;
                        stack.push((zz, cc));
                    }
                };
                if iz > 0 {
                    push(iz - 1, col, &mut visited, &mut stack);
                }
                if iz + 1 < nz {
                    push(iz + 1, col, &mut visited, &mut stack);
                }
                if col > 0 {
                    push(iz, col - 1, &mut visited, &mut stack);
                }
                if col + 1 < width {
                    push(iz, col + 1, &mut visited, &mut stack);
                }
            }
        }
    }
    if regions == 0 {
        return Err(UlrmError::DegenerateMap);
    }
    Ok(regions)
}

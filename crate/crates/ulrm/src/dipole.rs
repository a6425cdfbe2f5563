//! Permanent electric dipole moments d = <Psi| z |Psi> for m = 0
//! superpositions, reported in Debye.

use crate::basis::BasisSet;
use crate::error::{Result, UlrmError};
use crate::radial::RadialWavefunction;
use crate::units::DEBYE_PER_AU;

/// <l,0| cos(theta) |l+1,0> = (l+1)/sqrt((2l+1)(2l+3)).
fn angular_z_factor(l_low: u32) -> f64 {
    let l = l_low as f64;
    (l + 1.0) / ((2.0 * l + 1.0) * (2.0 * l + 3.0)).sqrt()
}

/// Radial integral of u_i u_j r dr over the overlap of the two grids,
/// trapezoid on the (log-spaced) grid of the first function.
fn radial_z_integral(a: &RadialWavefunction, b: &RadialWavefunction) -> Result<f64> {
    let lo = a.r_min().max(b.r_min());
    let hi = a.r_max().min(b.r_max());
    if hi <= lo {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for (&r, &ua) in a.r_grid.iter().zip(&a.u) {
        if r < lo || r > hi {
            continue;
        }
        let f = ua * b.evaluate_u(r)? * r;
        if let Some((rp, fp)) = prev {
            acc += 0.5 * (f + fp) * (r - rp);
        }
        prev = Some((r, f));
    }
    Ok(acc)
}

/// Full <i|z|j> matrix in atomic units; nonzero only for |l_i - l_j| = 1.
pub fn z_matrix(basis: &BasisSet) -> Result<Vec<Vec<f64>>> {
    let n = basis.len();
    let mut z = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let li = basis.states[i].l;
            let lj = basis.states[j].l;
            if li.abs_diff(lj) != 1 {
                continue;
            }
            let radial = radial_z_integral(&basis.wavefunctions[i], &basis.wavefunctions[j])?;
            let ang = angular_z_factor(li.min(lj));
            z[i][j] = radial * ang;
            z[j][i] = z[i][j];
        }
    }
    Ok(z)
}

/// d(R) = sum_ij c_i c_j <i|z|j>, converted to Debye.
pub fn dipole_moment(basis: &BasisSet, eigvec: &[f64]) -> Result<f64> {
    dipole_moment_with_matrix(&z_matrix(basis)?, eigvec)
}

pub fn dipole_moment_with_matrix(z: &[Vec<f64>], eigvec: &[f64]) -> Result<f64> {
    if z.len() != eigvec.len() {
        return Err(UlrmError::InvalidState(format!(
            "eigenvector dimension {} != dipole matrix size {}",
            eigvec.len(),
            z.len()
        )));
    }
    let mut d = 0.0;
    for (i, &ci) in eigvec.iter().enumerate() {
        if ci == 0.0 {
            continue;
        }
        for (j, &cj) in eigvec.iter().enumerate() {
            d += ci * cj * z[i][j];
        }
    }
    Ok(d * DEBYE_PER_AU)
}

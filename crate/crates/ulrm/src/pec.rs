//! Adiabatic potential energy curves: Hamiltonian assembly over an R-grid,
//! symmetric diagonalization, eigenvector-overlap curve tracking, and well
//! geometry.

use crate::basis::BasisSet;
use crate::error::{Result, UlrmError};
use crate::radial::RadialWavefunction;
use crate::scattering::{self, DEFAULT_T_DIV};
use crate::species::SpeciesData;
use crate::units::mhz_to_hartree;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Spherical harmonic on the z-axis: Y_l0(0) = sqrt((2l+1)/4pi).
pub fn y_on_axis(l: u32) -> f64 {
    ((2.0 * l as f64 + 1.0) / (4.0 * PI)).sqrt()
}

/// psi_i(R) for an m = 0 state evaluated at the perturber on the z-axis.
fn psi_at(wf: &RadialWavefunction, r: f64) -> Result<f64> {
    // Outside the state's grid the wavefunction is deep in a classically
    // forbidden region and negligible.
    if r < wf.r_min() || r > wf.r_max() {
        return Ok(0.0);
    }
    Ok(wf.evaluate_u(r)? / r * y_on_axis(wf.state.l))
}

/// d/dR [u(R)/R] * Y_l0(0): the radial gradient of psi_i on the axis. The
/// angular gradient of an m = 0 state vanishes on the axis (dP_l/dtheta = 0
/// at theta = 0), so this is the full gradient entering the p-wave term.
fn dpsi_at(wf: &RadialWavefunction, r: f64) -> Result<f64> {
    if r < wf.r_min() || r > wf.r_max() {
        return Ok(0.0);
    }
    let u = wf.evaluate_u(r)?;
    let du = wf.evaluate_du(r)?;
    Ok((du / r - u / (r * r)) * y_on_axis(wf.state.l))
}

/// Fermi pseudopotential Hamiltonian at one internuclear distance:
/// H_ij = E_i delta_ij + 2 pi a_s(k) psi_i psi_j - 6 pi a_p^3(k) psi_i' psi_j'.
/// Returns the (exactly symmetric) matrix and the p-wave reliability flag.
pub fn build_hamiltonian(
    basis: &BasisSet,
    perturber: &SpeciesData,
    r: f64,
    include_p_wave: bool,
) -> Result<(DMatrix<f64>, bool)> {
    build_hamiltonian_with_threshold(basis, perturber, r, include_p_wave, DEFAULT_T_DIV)
}

pub fn build_hamiltonian_with_threshold(
    basis: &BasisSet,
    perturber: &SpeciesData,
    r: f64,
    include_p_wave: bool,
    t_div: f64,
) -> Result<(DMatrix<f64>, bool)> {
    let n = basis.len();
    let eval = scattering::evaluate(perturber, basis.k_reference_energy, r, t_div);
    let mut psi = Vec::with_capacity(n);
    let mut dpsi = Vec::with_capacity(n);
    for wf in &basis.wavefunctions {
        psi.push(psi_at(wf, r)?);
        dpsi.push(if include_p_wave { dpsi_at(wf, r)? } else { 0.0 });
    }
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = basis.states[i].energy;
    }
    let cs = 2.0 * PI * eval.a_s;
    let cp = if include_p_wave {
        -6.0 * PI * eval.a_p3
    } else {
        0.0
    };
    for i in 0..n {
        for j in i..n {
            let v = cs * psi[i] * psi[j] + cp * dpsi[i] * dpsi[j];
            h[(i, j)] += v;
            if i != j {
                h[(j, i)] += v;
            }
        }
    }
    let reliable = !include_p_wave || eval.reliable;
    Ok((h, reliable))
}

#[derive(Debug, Clone)]
pub struct CurveTrack {
    /// Absolute adiabatic energy per R-grid point, hartree.
    pub energies: Vec<f64>,
    /// Unit-norm eigenvector per point; largest-|c| component positive.
    pub eigvecs: Vec<Vec<f64>>,
    /// Basis index this curve connects to at the outermost grid point.
    pub asymptote_state: usize,
    /// Smallest |<c(R_i), c(R_i+1)>| seen along the track (reliable points).
    pub min_overlap: f64,
}

#[derive(Debug)]
pub struct PotentialCurveSet {
    pub r_grid: Vec<f64>,
    pub curves: Vec<CurveTrack>,
    /// Per-point p-wave reliability (all true when p-wave is off).
    pub reliable: Vec<bool>,
    /// Declared zero of energy for reporting, hartree (absolute).
    pub reference_energy: f64,
    pub state_labels: Vec<String>,
}

impl PotentialCurveSet {
    /// Curve index whose asymptote is the given basis state.
    pub fn curve_for_state(&self, basis_index: usize) -> Option<usize> {
        self.curves
            .iter()
            .position(|c| c.asymptote_state == basis_index)
    }

    /// Energies of one curve relative to the declared reference.
    pub fn relative_energies(&self, curve: usize) -> Vec<f64> {
        self.curves[curve]
            .energies
            .iter()
            .map(|e| e - self.reference_energy)
            .collect()
    }
}

fn fix_sign(v: &mut DVector<f64>) {
    let mut max_idx = 0;
    let mut max_abs = 0.0;
    for (i, &c) in v.iter().enumerate() {
        if c.abs() > max_abs {
            max_abs = c.abs();
            max_idx = i;
        }
    }
    if v[max_idx] < 0.0 {
        v.neg_mut();
    }
}

/// Diagonalize at every R and connect curves by maximal eigenvector overlap
/// (not energy ordering), so avoided crossings stay on one track.
pub fn pec_diagonalize(
    basis: &BasisSet,
    perturber: &SpeciesData,
    r_grid: &[f64],
    include_p_wave: bool,
    reference_energy: f64,
) -> Result<PotentialCurveSet> {
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(UlrmError::OutOfRange("R grid must be increasing".into()));
    }
    let n = basis.len();
    let npts = r_grid.len();
    let mut energies = vec![vec![0.0; npts]; n];
    let mut vectors: Vec<Vec<DVector<f64>>> = vec![Vec::with_capacity(npts); n];
    let mut reliable = vec![true; npts];
    let mut min_overlap = vec![1.0_f64; n];

    let mut prev: Option<Vec<DVector<f64>>> = None;
    for (ip, &r) in r_grid.iter().enumerate() {
        let (h, rel) = build_hamiltonian(basis, perturber, r, include_p_wave)?;
        reliable[ip] = rel;
        let eig = nalgebra::SymmetricEigen::new(h);
        // Ascending energy order first.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .unwrap()
        });
        let mut vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vecs: Vec<DVector<f64>> = order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();

        if let Some(prev_vecs) = &prev {
            // Greedy assignment on |overlap|, ties broken by energy proximity.
            let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
            for (a, pv) in prev_vecs.iter().enumerate() {
                for (b, nv) in vecs.iter().enumerate() {
                    pairs.push((pv.dot(nv).abs(), a, b));
                }
            }
            pairs.sort_by(|x, y| {
                y.0.partial_cmp(&x.0)
                    .unwrap()
                    .then_with(|| x.1.cmp(&y.1))
                    .then_with(|| x.2.cmp(&y.2))
            });
            let mut taken_prev = vec![false; n];
            let mut taken_new = vec![false; n];
            let mut assign = vec![0usize; n];
            for (ov, a, b) in pairs {
                if taken_prev[a] || taken_new[b] {
                    continue;
                }
                taken_prev[a] = true;
                taken_new[b] = true;
                assign[a] = b;
                if rel {
                    min_overlap[a] = min_overlap[a].min(ov);
                }
            }
            let vals_old = vals.clone();
            let vecs_old = vecs;
            vals = (0..n).map(|a| vals_old[assign[a]]).collect();
            vecs = (0..n).map(|a| vecs_old[assign[a]].clone()).collect();
        }

        for v in &mut vecs {
            fix_sign(v);
        }
        for a in 0..n {
            energies[a][ip] = vals[a];
            vectors[a].push(vecs[a].clone());
        }
        prev = Some(vecs);
    }

    let mut curves = Vec::with_capacity(n);
    for a in 0..n {
        // Dominant component at the outermost point names the asymptote.
        let last = &vectors[a][npts - 1];
        let mut asym = 0;
        let mut best = 0.0;
        for (i, &c) in last.iter().enumerate() {
            if c.abs() > best {
                best = c.abs();
                asym = i;
            }
        }
        curves.push(CurveTrack {
            energies: std::mem::take(&mut energies[a]),
            eigvecs: vectors[a].iter().map(|v| v.as_slice().to_vec()).collect(),
            asymptote_state: asym,
            min_overlap: min_overlap[a],
        });
    }
    Ok(PotentialCurveSet {
        r_grid: r_grid.to_vec(),
        curves,
        reliable,
        reference_energy,
        state_labels: basis.labels(),
    })
}

/// Non-degenerate s-wave fast path for an isolated low-l state:
/// V_nl(R) = E_nl + 2 pi a_s(k(R)) [u(R)/R]^2 (2l+1)/4pi.
pub fn pec_low_l_swave(
    basis: &BasisSet,
    perturber: &SpeciesData,
    r_grid: &[f64],
) -> Result<PotentialCurveSet> {
    if basis.len() != 1 {
        return Err(UlrmError::InvalidState(
            "s-wave fast path needs a single-state basis".into(),
        ));
    }
    let state = basis.states[0];
    if state.l > 2 {
        return Err(UlrmError::InvalidState(
            "s-wave fast path is for low-l (l <= 2) states".into(),
        ));
    }
    let wf = &basis.wavefunctions[0];
    let mut energies = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let (k, _) = scattering::semiclassical_k(state.energy, r);
        let a_s = scattering::s_wave_length(perturber, k);
        let p = psi_at(wf, r)?;
        energies.push(state.energy + 2.0 * PI * a_s * p * p);
    }
    Ok(PotentialCurveSet {
        r_grid: r_grid.to_vec(),
        curves: vec![CurveTrack {
            energies,
            eigvecs: vec![vec![1.0]; r_grid.len()],
            asymptote_state: 0,
            min_overlap: 1.0,
        }],
        reliable: vec![true; r_grid.len()],
        reference_energy: state.energy,
        state_labels: basis.labels(),
    })
}

/// First-order wavefunction-mixing coefficients
/// <n'l'|2 pi a_s delta|nl> / (E_nl - E_n'l').
pub fn first_order_mixing(
    target: &RadialWavefunction,
    perturber: &SpeciesData,
    r: f64,
    others: &[&RadialWavefunction],
    degeneracy_threshold: f64,
) -> Result<Vec<f64>> {
    let e_t = target.state.energy;
    let (k, _) = scattering::semiclassical_k(e_t, r);
    let a_s = scattering::s_wave_length(perturber, k);
    let psi_t = psi_at(target, r)?;
    let mut coeffs = Vec::with_capacity(others.len());
    for wf in others {
        let gap = e_t - wf.state.energy;
        if gap.abs() <= degeneracy_threshold {
            return Err(UlrmError::Degeneracy { gap: gap.abs() });
        }
        let coupling = 2.0 * PI * a_s * psi_at(wf, r)? * psi_t;
        coeffs.push(coupling / gap);
    }
    Ok(coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellDescriptor {
    /// 1 = outermost.
    pub index: usize,
    pub r_min: f64,
    pub r_left: f64,
    pub r_right: f64,
    /// Minimum energy relative to the curve asymptote, hartree (< 0).
    pub depth: f64,
    /// Absolute energy at the minimum, hartree.
    pub v_min: f64,
    /// Grid index of the discrete minimum.
    pub i_min: usize,
}

/// Default floor below which a well is considered noise: 0.1 MHz.
pub fn default_depth_floor() -> f64 {
    mhz_to_hartree(0.1)
}

/// Wells between consecutive local maxima, indexed from outermost inward.
/// `asymptote` is the curve's large-R limit (used for depth); confinement
/// shallower than `depth_floor` is discarded.
pub fn find_wells(
    r_grid: &[f64],
    v: &[f64],
    asymptote: f64,
    depth_floor: f64,
) -> Vec<WellDescriptor> {
    let n = v.len();
    if n < 5 {
        return Vec::new();
    }
    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    for i in 1..n - 1 {
        if v[i] < v[i - 1] && v[i] <= v[i + 1] {
            minima.push(i);
        }
        if v[i] > v[i - 1] && v[i] >= v[i + 1] {
            maxima.push(i);
        }
    }
    let mut wells = Vec::new();
    for &im in minima.iter().rev() {
        let left = maxima
            .iter()
            .rev()
            .find(|&&j| j < im)
            .copied()
            .unwrap_or(0);
        let right = maxima.iter().find(|&&j| j > im).copied().unwrap_or(n - 1);
        let barrier = v[left].min(v[right]);
        if barrier - v[im] < depth_floor {
            continue;
        }
        // Parabolic refinement of the minimum.
        let (rm, vm) = refine_extremum(r_grid, v, im);
        wells.push(WellDescriptor {
            index: wells.len() + 1,
            r_min: rm,
            r_left: r_grid[left],
            r_right: r_grid[right],
            depth: vm - asymptote,
            v_min: vm,
            i_min: im,
        });
    }
    wells
}

fn refine_extremum(r: &[f64], v: &[f64], i: usize) -> (f64, f64) {
    if i == 0 || i + 1 >= v.len() {
        return (r[i], v[i]);
    }
    let (x0, x1, x2) = (r[i - 1], r[i], r[i + 1]);
    let (y0, y1, y2) = (v[i - 1], v[i], v[i + 1]);
    let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    if denom == 0.0 {
        return (x1, y1);
    }
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    if a.abs() < 1e-300 {
        return (x1, y1);
    }
    let xm = -b / (2.0 * a);
    if xm < x0 || xm > x2 {
        return (x1, y1);
    }
    let c = y1 - a * x1 * x1 - b * x1;
    (xm, a * xm * xm + b * xm + c)
}

/// Uniform R grid helper.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && hi > lo);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisSet;
    use crate::species::species_lookup;
    use approx::assert_relative_eq;

    fn rb() -> &'static SpeciesData {
        species_lookup("Rb").unwrap()
    }

    #[test]
    fn unperturbed_limit_is_diagonal() {
        // A perturber with a_s identically zero: fake it by evaluating at a
        // radius where u vanishes is fragile, so instead check the diagonal
        // against direct construction with the coupling removed.
        let basis = BasisSet::degenerate_manifold(rb(), 10, None).unwrap();
        let (h, _) = build_hamiltonian(&basis, rb(), 150.0, false).unwrap();
        let (k, _) = scattering::semiclassical_k(basis.k_reference_energy, 150.0);
        let a_s = scattering::s_wave_length(rb(), k);
        let mut coupling_scale = 0.0_f64;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let expected_diag = if i == j { basis.states[i].energy } else { 0.0 };
                let resid = h[(i, j)] - expected_diag;
                if i != j {
                    coupling_scale = coupling_scale.max(resid.abs());
                }
            }
        }
        assert!(a_s != 0.0);
        assert!(coupling_scale > 0.0);
        // Exact symmetry by construction.
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                assert_eq!(h[(i, j)], h[(j, i)]);
            }
        }
    }

    #[test]
    fn two_by_two_analytic_eigenvalues() {
        // s-wave rank-1 coupling of two states has closed-form eigenvalues.
        let basis = BasisSet::degenerate_manifold(rb(), 7, None).unwrap();
        // n = 7 manifold is l = 3..6 -> 4 states; restrict to a 2x2 block by
        // hand instead: build full H and compare its 2x2 leading sub-problem
        // with the quadratic formula using the same matrix elements.
        let (h, _) = build_hamiltonian(&basis, rb(), 60.0, false).unwrap();
        let a = h[(0, 0)];
        let d = h[(1, 1)];
        let b = h[(0, 1)];
        let two = DMatrix::from_row_slice(2, 2, &[a, b, b, d]);
        let eig = nalgebra::SymmetricEigen::new(two);
        let mean = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        let mut got: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        got.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_relative_eq!(got[0], mean - disc, max_relative = 1e-12);
        assert_relative_eq!(got[1], mean + disc, max_relative = 1e-12);
    }

    #[test]
    fn trace_conserved_and_residuals_small() {
        let basis = BasisSet::degenerate_manifold(rb(), 20, None).unwrap();
        let (h, _) = build_hamiltonian(&basis, rb(), 500.0, true).unwrap();
        let trace: f64 = (0..basis.len()).map(|i| h[(i, i)]).sum();
        let eig = nalgebra::SymmetricEigen::new(h.clone());
        let sum: f64 = eig.eigenvalues.iter().sum();
        assert_relative_eq!(sum, trace, max_relative = 1e-10);
        let h_norm = h.norm();
        for c in 0..basis.len() {
            let v = eig.eigenvectors.column(c);
            let resid = (&h * v - eig.eigenvalues[c] * v).norm();
            assert!(resid <= 1e-10 * h_norm, "residual {resid:.2e}");
        }
    }

    #[test]
    fn degenerate_manifold_one_detached_curve() {
        // Rank-1 s-wave perturbation of a degenerate block shifts exactly one
        // eigenvalue; all others stay near the unperturbed energies.
        let h_species = species_lookup("H").unwrap();
        let basis = BasisSet::degenerate_manifold(h_species, 20, None).unwrap();
        let r = 2.0 * 400.0 * 0.8;
        // Use Rb as perturber for a nonzero a_s.
        let (h, _) = build_hamiltonian(&basis, rb(), r, false).unwrap();
        let e0 = basis.states[0].energy;
        let eig = nalgebra::SymmetricEigen::new(h);
        let mut shifts: Vec<f64> = eig.eigenvalues.iter().map(|e| e - e0).collect();
        shifts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // One strongly shifted (the trilobite), rest essentially unmoved.
        let detached = shifts[0];
        assert!(detached < -1e-9);
        for s in &shifts[1..] {
            assert!(s.abs() < 1e-3 * detached.abs() + 1e-12);
        }
    }

    #[test]
    fn first_order_mixing_consistency() {
        // a_s = 0 equivalent: coefficients scale linearly with a_s, so check
        // antisymmetry of the denominator instead plus smallness.
        let basis = BasisSet::bracketing(rb(), 35, 0, None).unwrap();
        let it = basis.index_of(35, 0).unwrap();
        let target = &basis.wavefunctions[it];
        let others: Vec<&RadialWavefunction> = basis
            .wavefunctions
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != it)
            .map(|(_, w)| w)
            .collect();
        let r = 1800.0;
        let coeffs = first_order_mixing(target, rb(), r, &others, 1e-9).unwrap();
        assert_eq!(coeffs.len(), others.len());
        // Undoing the energy denominator on both directions recovers the same
        // coupling matrix element, up to the slightly different a_s(k)
        // evaluated at each state's own energy.
        let c_back =
            first_order_mixing(others[0], rb(), r, &[target], 1e-9).unwrap();
        let e_t = target.state.energy;
        let e_o = others[0].state.energy;
        assert_relative_eq!(
            coeffs[0] * (e_t - e_o),
            c_back[0] * (e_o - e_t),
            max_relative = 0.02
        );
    }

    #[test]
    fn degeneracy_error_raised() {
        let basis = BasisSet::degenerate_manifold(rb(), 20, None).unwrap();
        let res = first_order_mixing(
            &basis.wavefunctions[5],
            rb(),
            500.0,
            &[&basis.wavefunctions[6]],
            1e-6,
        );
        assert!(matches!(res, Err(UlrmError::Degeneracy { .. })));
    }

    #[test]
    fn parabola_single_well() {
        let r = linspace(1.0, 3.0, 101);
        let v: Vec<f64> = r.iter().map(|&x| 1e-6 * (x - 2.0) * (x - 2.0) - 1e-6).collect();
        let wells = find_wells(&r, &v, 0.0, 1e-12);
        assert_eq!(wells.len(), 1);
        assert_relative_eq!(wells[0].r_min, 2.0, max_relative = 1e-6);
        assert!(wells[0].depth < 0.0);
        assert!(wells[0].r_left < wells[0].r_min && wells[0].r_min < wells[0].r_right);
    }

    #[test]
    fn monotonic_curve_has_no_wells() {
        let r = linspace(1.0, 3.0, 101);
        let v: Vec<f64> = r.iter().map(|&x| -1.0 / x).collect();
        assert!(find_wells(&r, &v, 0.0, 1e-12).is_empty());
    }

    #[test]
    fn swave_curve_vanishes_at_radial_node() {
        let basis = BasisSet::single_state(rb(), 35, 0, None).unwrap();
        let wf = &basis.wavefunctions[0];
        // Locate a node of u near the outer region by sign change.
        let mut node_r = None;
        for w in wf.r_grid.windows(2) {
            if w[0] > 1200.0 {
                let u0 = wf.evaluate_u(w[0]).unwrap();
                let u1 = wf.evaluate_u(w[1]).unwrap();
                if u0.signum() != u1.signum() {
                    let (mut a, mut b) = (w[0], w[1]);
                    for _ in 0..100 {
                        let m = 0.5 * (a + b);
                        if wf.evaluate_u(m).unwrap().signum() == wf.evaluate_u(a).unwrap().signum()
                        {
                            a = m;
                        } else {
                            b = m;
                        }
                    }
                    node_r = Some(0.5 * (a + b));
                    break;
                }
            }
        }
        let node_r = node_r.expect("35S has outer nodes");
        let set = pec_low_l_swave(&basis, rb(), &[node_r]).unwrap();
        let v_rel = set.curves[0].energies[0] - set.reference_energy;
        assert!(v_rel.abs() < 1e-18, "V at node = {v_rel:.2e}");
    }
}

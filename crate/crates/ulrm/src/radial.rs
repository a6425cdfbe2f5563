//! Rydberg energies and radial wavefunctions u_nl(r) = r R_nl(r).
//!
//! The radial equation is integrated inward by the Numerov method on a
//! log-spaced grid. With x = ln r and u(r) = sqrt(r) w(x) the equation
//! becomes w'' = g(x) w with
//!
//!   g(x) = (l + 1/2)^2 - 2 E r^2 - 2 r
//!
//! for the pure Coulomb potential -1/r. Quantum defects enter only through
//! the energy; the unphysical inner oscillations of alkali states are
//! discarded by truncating at an l-dependent inner cutoff.

use crate::error::{Result, UlrmError};
use crate::species::{quantum_defect, SpeciesData};
use crate::spline::CubicSpline;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RydbergState {
    pub species: &'static SpeciesData,
    pub n: u32,
    pub l: u32,
    /// -1/(2 (n - delta_l)^2), hartree.
    pub energy: f64,
}

impl RydbergState {
    pub fn new(species: &'static SpeciesData, n: u32, l: u32) -> Result<Self> {
        let energy = rydberg_energy(species, n, l)?;
        Ok(Self {
            species,
            n,
            l,
            energy,
        })
    }

    /// Effective principal quantum number n - delta_l.
    pub fn nu(&self) -> f64 {
        (-0.5 / self.energy).sqrt()
    }

    /// Outer classical turning point of the radial motion.
    pub fn outer_turning_point(&self) -> f64 {
        let e = self.energy;
        let ll = (self.l * (self.l + 1)) as f64;
        (1.0 + (1.0 + 2.0 * e * ll).max(0.0).sqrt()) / (-2.0 * e)
    }

    fn inner_turning_point(&self) -> f64 {
        let e = self.energy;
        let ll = (self.l * (self.l + 1)) as f64;
        if self.l == 0 {
            0.0
        } else {
            (-1.0 + (1.0 + 2.0 * e * ll).max(0.0).sqrt()) / (2.0 * e)
        }
    }
}

pub fn rydberg_energy(species: &'static SpeciesData, n: u32, l: u32) -> Result<f64> {
    let delta = quantum_defect(species, n, l)?;
    let nu = n as f64 - delta;
    Ok(-0.5 / (nu * nu))
}

#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub n_points: usize,
    /// Outer grid radius; defaults to 2.5 n^2.
    pub r_max: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_points: 4000,
            r_max: None,
        }
    }
}

impl GridSpec {
    pub fn with_r_max(r_max: f64) -> Self {
        Self {
            r_max: Some(r_max),
            ..Self::default()
        }
    }
}

#[derive(Debug)]
pub struct RadialWavefunction {
    pub state: RydbergState,
    pub r_grid: Vec<f64>,
    pub u: Vec<f64>,
    /// |trapezoid norm - Simpson norm| after normalization.
    pub norm_error: f64,
    spline: CubicSpline,
}

impl RadialWavefunction {
    pub fn r_min(&self) -> f64 {
        self.r_grid[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.r_grid.last().unwrap()
    }

    pub fn evaluate_u(&self, r: f64) -> Result<f64> {
        self.spline.eval(r)
    }

    pub fn evaluate_du(&self, r: f64) -> Result<f64> {
        self.spline.deriv(r)
    }

    /// Number of interior sign changes, ignoring samples below a relative
    /// amplitude floor (guards against roundoff in the deep tails).
    pub fn node_count(&self) -> usize {
        count_sign_changes(&self.u)
    }
}

pub(crate) fn count_sign_changes(u: &[f64]) -> usize {
    let max = u.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    let floor = 1e-7 * max;
    let mut nodes = 0;
    let mut last_sign = 0.0_f64;
    for &v in u {
        if v.abs() <= floor {
            continue;
        }
        let s = v.signum();
        if last_sign != 0.0 && s != last_sign {
            nodes += 1;
        }
        last_sign = s;
    }
    nodes
}

/// Inward Numerov integration on the log grid with a WKB-seeded tail.
pub fn solve_radial(state: RydbergState, grid: GridSpec) -> Result<RadialWavefunction> {
    if state.energy >= 0.0 {
        return Err(UlrmError::IntegrationFailure(
            "energy is not bound (E >= 0)".into(),
        ));
    }
    let n_points = grid.n_points;
    if n_points < 100 {
        return Err(UlrmError::Resolution("need at least 100 radial points".into()));
    }
    let r_max = grid
        .r_max
        .unwrap_or(2.5 * (state.n as f64) * (state.n as f64));
    let r_min = (0.5 * state.inner_turning_point()).max(0.05);
    if r_max <= r_min * 1.5 {
        return Err(UlrmError::Resolution(format!(
            "grid [{r_min}, {r_max}] too narrow for n = {}, l = {}",
            state.n, state.l
        )));
    }

    let x_min = r_min.ln();
    let x_max = r_max.ln();
    let h = (x_max - x_min) / (n_points - 1) as f64;
    let r: Vec<f64> = (0..n_points)
        .map(|i| (x_min + h * i as f64).exp())
        .collect();

    let lh = state.l as f64 + 0.5;
    let e = state.energy;
    let g: Vec<f64> = r
        .iter()
        .map(|&ri| lh * lh - 2.0 * e * ri * ri - 2.0 * ri)
        .collect();

    let n_last = n_points - 1;
    if g[n_last] <= 0.0 {
        return Err(UlrmError::IntegrationFailure(format!(
            "tail at r = {r_max} is classically allowed; energy inconsistent with the potential"
        )));
    }

    // WKB seed of the decaying tail; the inward direction is the growing
    // (stable) one.
    let mut w = vec![0.0_f64; n_points];
    w[n_last] = 1e-150;
    w[n_last - 1] = w[n_last] * (h * 0.5 * (g[n_last].sqrt() + g[n_last - 1].sqrt())).exp();

    let h2 = h * h;
    for i in (1..n_last).rev() {
        let c_next = 1.0 - h2 * g[i - 1] / 12.0;
        let c_mid = 2.0 * (1.0 + 5.0 * h2 * g[i] / 12.0);
        let c_prev = 1.0 - h2 * g[i + 1] / 12.0;
        w[i - 1] = (c_mid * w[i] - c_prev * w[i + 1]) / c_next;
        if w[i - 1].abs() > 1e100 {
            // Rescale everything computed so far to avoid overflow.
            for wv in w[i - 1..].iter_mut() {
                *wv *= 1e-100;
            }
        }
    }

    let mut u: Vec<f64> = w.iter().zip(&r).map(|(&wi, &ri)| wi * ri.sqrt()).collect();

    // Below the inner turning point the physical solution decays toward the
    // origin, but the inward sweep is unstable there: integration error
    // excites the growing companion, which eventually flips sign and fakes a
    // node. Truncate from the amplitude minimum once regrowth is detected.
    let u_peak = u.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    let i_peak = u
        .iter()
        .position(|&v| v.abs() == u_peak)
        .unwrap_or(0);
    let mut min_abs = f64::INFINITY;
    let mut i_min_abs = i_peak;
    for i in (0..i_peak).rev() {
        if g[i] <= 0.0 {
            continue;
        }
        let a = u[i].abs();
        if a < min_abs {
            min_abs = a;
            i_min_abs = i;
        }
    }
    if min_abs < 1e-5 * u_peak {
        for v in u[..=i_min_abs].iter_mut() {
            *v = 0.0;
        }
    }

    // Norm in log coordinates: u^2 dr = w^2 r^2 dx.
    let f: Vec<f64> = u.iter().zip(&r).map(|(&ui, &ri)| ui * ui * ri).collect();
    let i_simpson = simpson_uniform(&f, h);
    let i_trap = trapezoid_uniform(&f, h);
    if !(i_simpson.is_finite() && i_simpson > 0.0) {
        return Err(UlrmError::IntegrationFailure(
            "non-normalizable solution (norm not finite)".into(),
        ));
    }
    let scale = 1.0 / i_simpson.sqrt();
    for ui in &mut u {
        *ui *= scale;
    }
    let norm_error = (i_trap / i_simpson - 1.0).abs();

    // Hydrogenic states must reproduce the exact node count; a mismatch
    // means the grid is too coarse.
    let hydrogenic = quantum_defect(state.species, state.n, state.l)? == 0.0;
    if hydrogenic {
        let expected = (state.n - state.l - 1) as usize;
        let got = count_sign_changes(&u);
        if got != expected {
            return Err(UlrmError::Accuracy(format!(
                "node count {got} != {expected} for hydrogenic n = {}, l = {}; refine the grid",
                state.n, state.l
            )));
        }
    }

    let spline = CubicSpline::new(&r, &u)?;
    Ok(RadialWavefunction {
        state,
        r_grid: r,
        u,
        norm_error,
        spline,
    })
}

pub(crate) fn trapezoid_uniform(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    let inner: f64 = f[1..n - 1].iter().sum();
    h * (0.5 * (f[0] + f[n - 1]) + inner)
}

pub(crate) fn simpson_uniform(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    if n < 3 {
        return trapezoid_uniform(f, h);
    }
    // Composite Simpson over an odd number of points; trapezoid patch on the
    // final interval when the count is even.
    let m = if n % 2 == 1 { n } else { n - 1 };
    let mut s = f[0] + f[m - 1];
    for (i, &fi) in f.iter().enumerate().take(m - 1).skip(1) {
        s += if i % 2 == 1 { 4.0 * fi } else { 2.0 * fi };
    }
    let mut total = s * h / 3.0;
    if n % 2 == 0 {
        total += 0.5 * h * (f[n - 2] + f[n - 1]);
    }
    total
}

/// Analytic hydrogen wavefunctions; the independent oracle for the Numerov
/// path (never routed through it).
pub mod hydrogen {
    /// Normalized u_nl(r) = r R_nl(r) for hydrogen (infinite nuclear mass).
    pub fn u_exact(n: u32, l: u32, r: f64) -> f64 {
        assert!(l < n, "l must be below n");
        let nf = n as f64;
        let rho = 2.0 * r / nf;
        // (n-l-1)!/(n+l)! as an inverse running product to avoid overflow.
        let mut ratio = 1.0_f64;
        for k in (n - l)..=(n + l) {
            ratio /= k as f64;
        }
        let norm = ((2.0 / nf).powi(3) * ratio / (2.0 * nf)).sqrt();
        let lag = laguerre(n - l - 1, 2 * l + 1, rho);
        r * norm * (-rho / 2.0).exp() * rho.powi(l as i32) * lag
    }

    /// Generalized Laguerre polynomial L_k^a(x) by the three-term recurrence.
    pub fn laguerre(k: u32, a: u32, x: f64) -> f64 {
        let af = a as f64;
        let mut lm1 = 1.0_f64;
        if k == 0 {
            return lm1;
        }
        let mut lm0 = 1.0 + af - x;
        for j in 1..k {
            let jf = j as f64;
            let next = ((2.0 * jf + 1.0 + af - x) * lm0 - (jf + af) * lm1) / (jf + 1.0);
            lm1 = lm0;
            lm0 = next;
        }
        lm0
    }

    /// Radial nodes of u_nl located by sign-change bisection of the analytic
    /// form.
    pub fn node_radii(n: u32, l: u32) -> Vec<f64> {
        let r_max = 2.5 * (n * n) as f64;
        let samples = 20_000;
        let mut nodes = Vec::new();
        let mut prev_r = r_max * 1e-6;
        let mut prev_u = u_exact(n, l, prev_r);
        for i in 1..=samples {
            let r = r_max * i as f64 / samples as f64;
            let u = u_exact(n, l, r);
            if prev_u != 0.0 && u != 0.0 && prev_u.signum() != u.signum() {
                let (mut a, mut b) = (prev_r, r);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if u_exact(n, l, m).signum() == u_exact(n, l, a).signum() {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                nodes.push(0.5 * (a + b));
            }
            prev_r = r;
            prev_u = u;
        }
        nodes
    }
}

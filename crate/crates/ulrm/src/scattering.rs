//! Low-energy electron-atom scattering model: energy-dependent s-wave
//! scattering length, the triplet p-wave phase shift with its shape
//! resonance, and the semiclassical electron wavenumber.

use crate::species::SpeciesData;
use crate::units::ev_to_hartree;

/// |tan delta_p| above this marks the divergence window as unreliable.
pub const DEFAULT_T_DIV: f64 = 50.0;

#[derive(Debug, Clone, Copy)]
pub struct ScatteringEvaluation {
    pub k: f64,
    pub a_s: f64,
    pub a_p3: f64,
    pub delta_p: f64,
    pub reliable: bool,
    /// True where the perturber sits outside the classically allowed region
    /// (k clamped to zero there).
    pub forbidden: bool,
}

/// Semiclassical electron wavenumber k(r) = sqrt(2 (E_nl + 1/r)).
/// Classically forbidden radii clamp k to 0 and set the flag.
pub fn semiclassical_k(e_nl: f64, r: f64) -> (f64, bool) {
    let v = 2.0 * (e_nl + 1.0 / r);
    if v <= 0.0 {
        (0.0, v < 0.0)
    } else {
        (v.sqrt(), false)
    }
}

/// Effective-range s-wave scattering length a_s(k) = a0 + alpha pi k / 3.
pub fn s_wave_length(species: &SpeciesData, k: f64) -> f64 {
    species.a0 + species.alpha * std::f64::consts::PI * k / 3.0
}

/// tan of the p-wave phase shift: Breit-Wigner with the p-wave threshold law
/// Gamma(E) = Gamma (E/E_res)^(3/2), plus an optional background volume.
fn tan_delta_p(species: &SpeciesData, e: f64) -> f64 {
    if e <= 0.0 {
        return 0.0;
    }
    let p = &species.pwave;
    let gamma_e = 0.5 * p.gamma * (e / p.e_res).powf(1.5);
    let bw = gamma_e / (p.e_res - e);
    let k3 = (2.0 * e).powf(1.5);
    bw - p.background * k3
}

/// Triplet p-wave phase shift, continuous and rising through pi/2 at the
/// resonance energy. Returns (delta_p, extrapolation_warning).
pub fn p_wave_phase_shift(species: &SpeciesData, e: f64) -> (f64, bool) {
    let warn = !(0.0..=ev_to_hartree(0.1)).contains(&e);
    if e <= 0.0 {
        return (0.0, warn);
    }
    let p = &species.pwave;
    let gamma_e = 0.5 * p.gamma * (e / p.e_res).powf(1.5);
    let mut delta = gamma_e.atan2(p.e_res - e);
    if species.pwave.background != 0.0 {
        let k3 = (2.0 * e).powf(1.5);
        delta -= (species.pwave.background * k3).atan();
    }
    (delta, warn)
}

/// p-wave scattering volume a_p^3(k) = -tan(delta_p)/k^3 with reliability.
/// The k -> 0 limit is finite (threshold law) and handled in closed form.
pub fn p_wave_volume(species: &SpeciesData, k: f64) -> (f64, bool) {
    p_wave_volume_with_threshold(species, k, DEFAULT_T_DIV)
}

pub fn p_wave_volume_with_threshold(species: &SpeciesData, k: f64, t_div: f64) -> (f64, bool) {
    let p = &species.pwave;
    if k <= 1e-8 {
        // lim tan(delta_p)/k^3 as k -> 0.
        let limit = p.gamma / (2.0_f64.powf(2.5) * p.e_res.powf(2.5));
        return (-limit + p.background, true);
    }
    let e = 0.5 * k * k;
    let t = tan_delta_p(species, e);
    (-t / (k * k * k), t.abs() <= t_div)
}

/// Analytic unreliable window in electron energy: |tan delta_p| > t_div.
/// Returns (e_lo, e_hi) in hartree around the resonance.
pub fn unreliable_energy_window(species: &SpeciesData, t_div: f64) -> (f64, f64) {
    let p = &species.pwave;
    // Solve |gamma(E)/2 / (E_res - E)| = t_div by bisection on each side.
    let solve = |lo: f64, hi: f64| -> f64 {
        let f = |e: f64| tan_delta_p(species, e).abs() - t_div;
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if (f(a) > 0.0) == (f(m) > 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    let e_lo = solve(p.e_res * 1e-6, p.e_res);
    let e_hi = solve(p.e_res * 20.0, p.e_res);
    (e_lo.min(e_hi), e_lo.max(e_hi))
}

/// Unreliable window mapped to internuclear distance for a given reference
/// energy: R such that the semiclassical electron energy falls in the masked
/// band. Returns None when the band lies outside r > 0.
pub fn unreliable_r_window(
    species: &SpeciesData,
    e_ref: f64,
    t_div: f64,
) -> Option<(f64, f64)> {
    let (e_lo, e_hi) = unreliable_energy_window(species, t_div);
    // E_electron(r) = e_ref + 1/r, decreasing in r.
    let r_of = |e_el: f64| -> Option<f64> {
        let inv = e_el - e_ref;
        if inv > 0.0 {
            Some(1.0 / inv)
        } else {
            None
        }
    };
    match (r_of(e_hi), r_of(e_lo)) {
        (Some(r_lo), Some(r_hi)) => Some((r_lo, r_hi)),
        _ => None,
    }
}

/// Full evaluation at one internuclear distance for a given reference energy.
pub fn evaluate(
    perturber: &SpeciesData,
    e_ref: f64,
    r: f64,
    t_div: f64,
) -> ScatteringEvaluation {
    let (k, forbidden) = semiclassical_k(e_ref, r);
    let a_s = s_wave_length(perturber, k);
    let (delta_p, _) = p_wave_phase_shift(perturber, 0.5 * k * k);
    let (a_p3, reliable) = p_wave_volume_with_threshold(perturber, k, t_div);
    ScatteringEvaluation {
        k,
        a_s,
        a_p3,
        delta_p,
        reliable,
        forbidden,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::species_lookup;
    use crate::units::ev_to_hartree;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn rb() -> &'static crate::species::SpeciesData {
        species_lookup("Rb").unwrap()
    }

    #[test]
    fn turning_point_wavenumber() {
        let e = -4.081633e-4;
        let (k, forbidden) = semiclassical_k(e, 1.0 / 4.081633e-4);
        assert!(k < 1e-8);
        assert!(!forbidden || k == 0.0);
    }

    #[test]
    fn wavenumber_arithmetic() {
        let e = -4.081633e-4;
        let (k, _) = semiclassical_k(e, 1225.0);
        assert_relative_eq!(k, (2.0 * 4.081633e-4_f64).sqrt(), max_relative = 1e-3);
    }

    #[test]
    fn wavenumber_monotone_decreasing_in_r() {
        let e = -4.0e-4;
        let mut prev = f64::INFINITY;
        for i in 1..200 {
            let r = 10.0 * i as f64;
            let (k, _) = semiclassical_k(e, r);
            assert!(k <= prev);
            prev = k;
        }
    }

    #[test]
    fn zero_energy_scattering_lengths() {
        assert_eq!(s_wave_length(rb(), 0.0), -18.5);
        assert_eq!(s_wave_length(species_lookup("Cs").unwrap(), 0.0), -21.7);
    }

    #[test]
    fn effective_range_arithmetic() {
        let a = s_wave_length(rb(), 2.8573e-2);
        assert_relative_eq!(a, -18.5 + 319.2 * PI / 3.0 * 2.8573e-2, max_relative = 1e-12);
        assert_relative_eq!(a, -8.949, max_relative = 1e-3);
    }

    #[test]
    fn s_wave_affine_slope() {
        // Finite-difference slope must equal alpha pi / 3.
        let h = 1e-6;
        let slope = (s_wave_length(rb(), 0.01 + h) - s_wave_length(rb(), 0.01 - h)) / (2.0 * h);
        assert_relative_eq!(slope, rb().alpha * PI / 3.0, max_relative = 1e-9);
    }

    #[test]
    fn phase_shift_pi_over_2_at_resonance() {
        let (d, _) = p_wave_phase_shift(rb(), rb().pwave.e_res);
        assert_relative_eq!(d, FRAC_PI_2, max_relative = 1e-12);
    }

    #[test]
    fn phase_shift_zero_at_threshold() {
        let (d, _) = p_wave_phase_shift(rb(), 0.0);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn phase_shift_above_resonance() {
        let (d, _) = p_wave_phase_shift(rb(), ev_to_hartree(0.04));
        assert!(d > FRAC_PI_2);
    }

    #[test]
    fn phase_shift_monotone_through_window() {
        // Monotone through the resonance; beyond ~3 E_res the threshold-law
        // width makes delta roll over slightly, so stop short of that.
        let mut prev = -1.0;
        for i in 0..500 {
            let e = 2.8 * rb().pwave.e_res * (i as f64 + 1.0) / 500.0;
            let (d, _) = p_wave_phase_shift(rb(), e);
            assert!(d > prev, "not monotone at E = {e}");
            prev = d;
        }
    }

    #[test]
    fn volume_at_quarter_pi() {
        // Find k where delta_p = pi/4 and check a_p3 = -1/k^3 there.
        let mut lo = 1e-4;
        let mut hi = (2.0 * rb().pwave.e_res).sqrt();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let (d, _) = p_wave_phase_shift(rb(), 0.5 * mid * mid);
            if d < FRAC_PI_4 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let k = 0.5 * (lo + hi);
        let (v, reliable) = p_wave_volume(rb(), k);
        assert!(reliable);
        assert_relative_eq!(v, -1.0 / (k * k * k), max_relative = 1e-6);
    }

    #[test]
    fn unreliable_at_resonance() {
        let k_res = (2.0 * rb().pwave.e_res).sqrt();
        let (_, reliable) = p_wave_volume(rb(), k_res);
        assert!(!reliable);
    }

    #[test]
    fn volume_negative_below_resonance() {
        let k = (2.0 * rb().pwave.e_res * 0.25).sqrt();
        let (v, reliable) = p_wave_volume(rb(), k);
        assert!(reliable);
        assert!(v < 0.0);
        assert!(v.is_finite());
    }

    #[test]
    fn mask_is_single_contiguous_interval() {
        let (e_lo, e_hi) = unreliable_energy_window(rb(), DEFAULT_T_DIV);
        assert!(e_lo < rb().pwave.e_res && rb().pwave.e_res < e_hi);
        let mut in_window_regions = 0;
        let mut inside = false;
        for i in 1..20_000 {
            let e = ev_to_hartree(0.1) * i as f64 / 20_000.0;
            let k = (2.0 * e).sqrt();
            let (_, reliable) = p_wave_volume(rb(), k);
            if !reliable && !inside {
                in_window_regions += 1;
            }
            inside = !reliable;
            if !reliable {
                assert!(
                    e >= e_lo * 0.999 && e <= e_hi * 1.001,
                    "unreliable point outside analytic window"
                );
            }
        }
        assert_eq!(in_window_regions, 1);
    }

    #[test]
    fn zero_k_limit_finite() {
        let (v, reliable) = p_wave_volume(rb(), 0.0);
        assert!(reliable);
        assert!(v.is_finite() && v < 0.0);
    }
}

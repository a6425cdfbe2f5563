//! Randomized invariants over the unit conversions, scattering model and
//! polyatomic line algebra.

use proptest::prelude::*;
use ulrm::scattering::s_wave_length;
use ulrm::species::species_lookup;
use ulrm::spectra::{enumerate_lines, polyatomic_shift, AtomCap, DimerEnergyQuartet, RydbergSpecies};
use ulrm::units::{ev_to_hartree, hartree_to_ev, hartree_to_mhz, mhz_to_hartree};
use ulrm::vibrational::reduced_mass;

proptest! {
    #[test]
    fn energy_unit_round_trips(e in -1.0e3_f64..1.0e3) {
        let via_mhz = mhz_to_hartree(hartree_to_mhz(e));
        prop_assert!((via_mhz - e).abs() <= 1e-12 * e.abs().max(1.0));
        let via_ev = ev_to_hartree(hartree_to_ev(e));
        prop_assert!((via_ev - e).abs() <= 1e-12 * e.abs().max(1.0));
    }

    #[test]
    fn s_wave_length_is_affine_in_k(
        k1 in 0.0_f64..0.2,
        k2 in 0.0_f64..0.2,
        t in 0.0_f64..1.0,
    ) {
        let rb = species_lookup("Rb").unwrap();
        let k_mid = (1.0 - t) * k1 + t * k2;
        let a_mid = s_wave_length(rb, k_mid);
        let interp = (1.0 - t) * s_wave_length(rb, k1) + t * s_wave_length(rb, k2);
        prop_assert!((a_mid - interp).abs() <= 1e-10 * interp.abs().max(1.0));
    }

    #[test]
    fn polyatomic_shift_is_exactly_additive(
        a in -1.0e3_f64..-1.0e-3,
        b in -1.0e3_f64..-1.0e-3,
        c in -1.0e3_f64..-1.0e-3,
        d in -1.0e3_f64..-1.0e-3,
        i in 0_u32..=10,
        j in 0_u32..=10,
    ) {
        let q = DimerEnergyQuartet { a, b, c, d, n: 40, l: 0 };
        prop_assert_eq!(polyatomic_shift(&q, RydbergSpecies::Rb, i, j), i as f64 * a + j as f64 * b);
        prop_assert_eq!(polyatomic_shift(&q, RydbergSpecies::Cs, i, j), i as f64 * c + j as f64 * d);
    }

    #[test]
    fn enumerated_lines_are_sorted_and_bounded(
        a in -1.0e3_f64..-1.0e-3,
        b in -1.0e3_f64..-1.0e-3,
        max_atoms in 1_u32..=8,
    ) {
        let q = DimerEnergyQuartet { a, b, c: 2.0 * a, d: 2.0 * b, n: 40, l: 0 };
        let lines = enumerate_lines(&q, RydbergSpecies::Rb, AtomCap::Total(max_atoms), None).unwrap();
        // N(N+3)/2 compositions; coincident shifts may merge.
        let m = max_atoms as usize;
        prop_assert!(!lines.is_empty() && lines.len() <= m * (m + 3) / 2);
        for w in lines.windows(2) {
            prop_assert!(w[0].shift_mhz < w[1].shift_mhz);
        }
        for line in &lines {
            prop_assert!(line.i + line.j >= 1 && line.i + line.j <= max_atoms);
        }
    }

    #[test]
    fn reduced_mass_is_symmetric_and_bounded(
        m1 in 1.0_f64..1.0e6,
        m2 in 1.0_f64..1.0e6,
    ) {
        let mu = reduced_mass(m1, m2);
        prop_assert_eq!(mu, reduced_mass(m2, m1));
        prop_assert!(mu > 0.0 && mu <= m1.min(m2));
        prop_assert!(mu >= 0.5 * m1.min(m2) * (1.0 - 1e-15));
    }
}

//! Manifest-driven regression runner: named cases with expected values,
//! tolerances and per-case deltas.

use crate::error::{Result, UlrmError};
use crate::radial::{hydrogen, solve_radial, GridSpec, RydbergState};
use crate::scattering;
use crate::species::species_lookup;
use crate::units::hartree_to_ev;
use crate::workflows::{
    dimer_outermost_levels, dimer_quartet, outermost_well_dipole, CurveMethod,
};
use serde::Deserialize;

pub const DEFAULT_MANIFEST: &str = include_str!("../data/regression.json");

#[derive(Debug, Deserialize)]
pub struct Manifest {
    pub cases: Vec<Case>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Case {
    /// One vibrational level of a dimer's outermost well vs. an expected MHz
    /// value.
    DimerLevel {
        id: String,
        rydberg: String,
        perturber: String,
        n: u32,
        l: u32,
        method: String,
        level: usize,
        expect_mhz: f64,
        rel_tol: f64,
    },
    /// Full (a, b, c, d) quartet at nS including strict ordering.
    Quartet {
        id: String,
        n: u32,
        expect_mhz: [f64; 4],
        rel_tol: f64,
    },
    /// RMS of the numeric hydrogen radial solution against the analytic form.
    HydrogenRms {
        id: String,
        n: u32,
        l: u32,
        max_rms: f64,
    },
    /// p-wave resonance position of a bundled species model.
    PwaveResonance {
        id: String,
        species: String,
        expect_ev: f64,
        rel_tol: f64,
    },
    /// Outermost-well permanent dipole in Debye.
    Dipole {
        id: String,
        rydberg: String,
        perturber: String,
        n: u32,
        l: u32,
        expect_debye: f64,
        rel_tol: f64,
    },
}

impl Case {
    pub fn id(&self) -> &str {
        match self {
            Case::DimerLevel { id, .. }
            | Case::Quartet { id, .. }
            | Case::HydrogenRms { id, .. }
            | Case::PwaveResonance { id, .. }
            | Case::Dipole { id, .. } => id,
        }
    }
}

#[derive(Debug)]
pub struct CaseReport {
    pub id: String,
    pub passed: bool,
    /// Human-readable observed-vs-expected line.
    pub detail: String,
}

pub fn parse_manifest(text: &str) -> Result<Manifest> {
    serde_json::from_str(text).map_err(|e| UlrmError::Manifest(e.to_string()))
}

fn within(observed: f64, expected: f64, rel_tol: f64) -> bool {
    (observed - expected).abs() <= rel_tol * expected.abs()
}

/// Numeric-vs-analytic RMS over the numeric grid, sign-aligned by overlap.
pub fn hydrogen_rms(n: u32, l: u32) -> Result<f64> {
    let h = species_lookup("H")?;
    let state = RydbergState::new(h, n, l)?;
    // The default r_max = 2.5 n^2 leaves the WKB-seeded tail only ~0.2 n
    // decay e-foldings, which contaminates low-n solutions; 2 n^2 + 40 n
    // gives the seed room to relax at every n.
    let n2 = (n * n) as f64;
    let grid = GridSpec::with_r_max(2.0 * n2 + 40.0 * n as f64);
    let wf = solve_radial(state, grid)?;
    let mut overlap = 0.0;
    let exact: Vec<f64> = wf
        .r_grid
        .iter()
        .map(|&r| hydrogen::u_exact(n, l, r))
        .collect();
    for (u, e) in wf.u.iter().zip(&exact) {
        overlap += u * e;
    }
    let sign = if overlap < 0.0 { -1.0 } else { 1.0 };
    let mut ss = 0.0;
    for (u, e) in wf.u.iter().zip(&exact) {
        let d = sign * u - e;
        ss += d * d;
    }
    Ok((ss / wf.u.len() as f64).sqrt())
}

pub fn run_case(case: &Case) -> CaseReport {
    let id = case.id().to_string();
    let outcome = (|| -> Result<(bool, String)> {
        match case {
            Case::DimerLevel {
                rydberg,
                perturber,
                n,
                l,
                method,
                level,
                expect_mhz,
                rel_tol,
                ..
            } => {
                let ryd = species_lookup(rydberg)?;
                let pert = species_lookup(perturber)?;
                let m = match method.as_str() {
                    "swave" => CurveMethod::SWave,
                    "diag" => CurveMethod::Diagonalize,
                    "diag-pwave" => CurveMethod::DiagonalizePWave,
                    other => {
                        return Err(UlrmError::Manifest(format!("unknown method '{other}'")))
                    }
                };
                let res = dimer_outermost_levels(ryd, pert, *n, *l, level + 1, m, 1000)?;
                let obs = res
                    .levels
                    .get(*level)
                    .map(|lv| lv.energy_shift_mhz)
                    .ok_or_else(|| {
                        UlrmError::InvalidState(format!("well holds no level v = {level}"))
                    })?;
                Ok((
                    within(obs, *expect_mhz, *rel_tol),
                    format!("observed {obs:.4} MHz, expected {expect_mhz} MHz +-{:.0}%", rel_tol * 100.0),
                ))
            }
            Case::Quartet {
                n,
                expect_mhz,
                rel_tol,
                ..
            } => {
                let q = dimer_quartet(*n)?;
                let obs = [q.a, q.b, q.c, q.d];
                let values_ok = obs
                    .iter()
                    .zip(expect_mhz)
                    .all(|(o, e)| within(*o, *e, *rel_tol));
                let ordering_ok =
                    q.d.abs() > q.c.abs() && q.c.abs() > q.b.abs() && q.b.abs() > q.a.abs();
                Ok((
                    values_ok && ordering_ok,
                    format!(
                        "observed ({:.4}, {:.4}, {:.4}, {:.4}) MHz, expected {:?} +-{:.0}%, ordering {}",
                        q.a, q.b, q.c, q.d, expect_mhz, rel_tol * 100.0,
                        if ordering_ok { "ok" } else { "violated" }
                    ),
                ))
            }
            Case::HydrogenRms { n, l, max_rms, .. } => {
                let rms = hydrogen_rms(*n, *l)?;
                Ok((rms <= *max_rms, format!("RMS {rms:.2e}, limit {max_rms:.1e}")))
            }
            Case::PwaveResonance {
                species,
                expect_ev,
                rel_tol,
                ..
            } => {
                let sp = species_lookup(species)?;
                // Locate delta_p = pi/2 by bisection, independent of the
                // stored parameter.
                let mut lo = sp.pwave.e_res * 1e-3;
                let mut hi = sp.pwave.e_res * 50.0;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let (d, _) = scattering::p_wave_phase_shift(sp, mid);
                    if d < std::f64::consts::FRAC_PI_2 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let obs_ev = hartree_to_ev(0.5 * (lo + hi));
                Ok((
                    within(obs_ev, *expect_ev, *rel_tol),
                    format!("observed {obs_ev:.4} eV, expected {expect_ev} eV +-{:.0}%", rel_tol * 100.0),
                ))
            }
            Case::Dipole {
                rydberg,
                perturber,
                n,
                l,
                expect_debye,
                rel_tol,
                ..
            } => {
                let ryd = species_lookup(rydberg)?;
                let pert = species_lookup(perturber)?;
                let d = outermost_well_dipole(ryd, pert, *n, *l)?;
                Ok((
                    within(d, *expect_debye, *rel_tol),
                    format!("observed {d:.1} D, expected {expect_debye} D +-{:.0}%", rel_tol * 100.0),
                ))
            }
        }
    })();
    match outcome {
        Ok((passed, detail)) => CaseReport { id, passed, detail },
        Err(e) => CaseReport {
            id,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Run every case (or just `only`), printing one line per case to `out`.
pub fn run_manifest(
    manifest: &Manifest,
    only: Option<&str>,
    mut out: impl std::io::Write,
) -> Result<bool> {
    let mut all_passed = true;
    let mut matched = 0;
    for case in &manifest.cases {
        if let Some(filter) = only {
            if case.id() != filter {
                continue;
            }
        }
        matched += 1;
        let report = run_case(case);
        all_passed &= report.passed;
        writeln!(
            out,
            "{} {}: {}",
            if report.passed { "PASS" } else { "FAIL" },
            report.id,
            report.detail
        )
        .map_err(|e| UlrmError::Io {
            path: "<stdout>".into(),
            source: e,
        })?;
    }
    if matched == 0 {
        return Err(UlrmError::Manifest(format!(
            "no case matches '{}'",
            only.unwrap_or("<all>")
        )));
    }
    Ok(all_passed)
}

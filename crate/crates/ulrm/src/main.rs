//! `ulrm` command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 compute failure, 3 regression
//! failure.

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use ulrm::basis::{l_letter, parse_state_label, BasisSet};
use ulrm::config::{validate_nl, ConfigFile};
use ulrm::density::axial_lobe_count;
use ulrm::error::{Result, UlrmError};
use ulrm::io;
use ulrm::pec::{default_depth_floor, find_wells, linspace, pec_diagonalize, pec_low_l_swave};
use ulrm::radial::{solve_radial, GridSpec, RydbergState};
use ulrm::regress;
use ulrm::scattering;
use ulrm::species::{all_species, data_version, species_lookup};
use ulrm::spectra::{
    enumerate_lines, render_spectrum, AtomCap, DimerEnergyQuartet, PoissonWeights,
    RydbergSpecies,
};
use ulrm::units::{ev_to_hartree, hartree_to_ev, mhz_to_hartree};
use ulrm::vibrational::{reduced_mass, solve_vibrational, VibrationalConfig};
use ulrm::workflows;

#[derive(Parser)]
#[command(
    name = "ulrm",
    version,
    about = "Potential curves, vibrational levels, densities, dipoles and \
             photoassociation spectra of ultralong-range Rydberg molecules"
)]
struct Cli {
    /// Optional TOML config file; CLI flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Show or dump the bundled species data table.
    Species(SpeciesArgs),
    /// Solve one Rydberg radial wavefunction and emit (r, u) samples.
    Radial(RadialArgs),
    /// Tabulate the p-wave phase shift model vs. electron energy.
    Scatter(ScatterArgs),
    /// Build Born-Oppenheimer potential energy curves.
    Pec(PecArgs),
    /// Solve vibrational levels in a well of a previously emitted PEC.
    Vib(VibArgs),
    /// Electron density map of the trilobite curve at a chosen well.
    Density(DensityArgs),
    /// Permanent electric dipole moment at the outermost-well minimum.
    Dipole(DipoleArgs),
    /// Polyatomic photoassociation line spectrum from a dimer quartet.
    Spectrum(SpectrumArgs),
    /// Outermost-well level scaling study over an n-range (nD states).
    Scaling(ScalingArgs),
    /// Run the named regression cases from a manifest.
    Regress(RegressArgs),
}

#[derive(Args)]
struct SpeciesArgs {
    /// Dump the full table as JSON instead of the one-line summary.
    #[arg(long)]
    dump: bool,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RadialArgs {
    #[arg(long)]
    species: Option<String>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    l: Option<u64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    points: Option<u64>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScatterArgs {
    #[arg(long)]
    species: Option<String>,
    /// Upper electron energy in eV (default 0.05).
    #[arg(long = "emax-ev")]
    emax_ev: Option<f64>,
    #[arg(long)]
    points: Option<u64>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PecArgs {
    #[arg(long)]
    rydberg: Option<String>,
    /// Target state label, e.g. 35S or 42D.
    #[arg(long)]
    state: Option<String>,
    #[arg(long)]
    perturber: Option<String>,
    /// "on" or "off" (default off).
    #[arg(long)]
    pwave: Option<String>,
    /// Basis: single | extended | manifold (default: extended).
    #[arg(long)]
    basis: Option<String>,
    #[arg(long)]
    rmin: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    points: Option<u64>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VibArgs {
    /// PEC CSV produced by `ulrm pec`.
    #[arg(long, value_name = "FILE")]
    pec: Option<PathBuf>,
    /// "outermost" or a 1-based well index counted from the outside.
    #[arg(long)]
    well: Option<String>,
    /// "auto" (reduced mass from the PEC provenance) or a value in a.u.
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    levels: Option<u64>,
    /// Curve column index; defaults to the PEC's tracked target curve.
    #[arg(long)]
    curve: Option<u64>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long)]
    rydberg: Option<String>,
    #[arg(long)]
    perturber: Option<String>,
    /// Principal quantum number of the trilobite manifold.
    #[arg(long)]
    n: Option<u64>,
    /// Well index (1 = outermost).
    #[arg(long)]
    well: Option<u64>,
    /// Half-extent of the map in a.u. (default 2.2 n^2).
    #[arg(long)]
    extent: Option<f64>,
    #[arg(long)]
    nrho: Option<u64>,
    #[arg(long)]
    nz: Option<u64>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DipoleArgs {
    #[arg(long)]
    rydberg: Option<String>,
    #[arg(long)]
    perturber: Option<String>,
    /// Target state label, e.g. 42S.
    #[arg(long)]
    state: Option<String>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    rydberg: Option<String>,
    /// Rydberg state label (e.g. 55S); used with --quartet auto.
    #[arg(long)]
    state: Option<String>,
    #[arg(long = "max-atoms")]
    max_atoms: Option<u64>,
    /// Cap mode: total | per-species (default total).
    #[arg(long)]
    cap: Option<String>,
    /// "auto" (compute at --state) or "a,b,c,d" in MHz.
    #[arg(long)]
    quartet: Option<String>,
    /// Lorentzian FWHM in MHz (default 0.05).
    #[arg(long)]
    broaden: Option<f64>,
    /// Mean Rb occupation for Poisson line weights.
    #[arg(long = "lambda-rb")]
    lambda_rb: Option<f64>,
    /// Mean Cs occupation for Poisson line weights.
    #[arg(long = "lambda-cs")]
    lambda_cs: Option<f64>,
    #[arg(long = "grid-points")]
    grid_points: Option<u64>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long)]
    nlo: Option<u64>,
    #[arg(long)]
    nhi: Option<u64>,
    #[arg(long)]
    step: Option<u64>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RegressArgs {
    /// Manifest JSON; defaults to the bundled case list.
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,
    /// Run only the case with this id.
    #[arg(long)]
    only: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are success; everything else is usage.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn emit_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => io::write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    match out {
        Some(path) => io::write_json(path, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value).unwrap());
            Ok(())
        }
    }
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| UlrmError::Usage(format!("missing required --{flag}")))
}

fn run(cli: Cli) -> Result<u8> {
    let cfg = ConfigFile::load(cli.config.as_deref())?;
    match cli.command {
        Command::Species(a) => cmd_species(a),
        Command::Radial(a) => cmd_radial(a, &cfg),
        Command::Scatter(a) => cmd_scatter(a, &cfg),
        Command::Pec(a) => cmd_pec(a, &cfg),
        Command::Vib(a) => cmd_vib(a, &cfg),
        Command::Density(a) => cmd_density(a, &cfg),
        Command::Dipole(a) => cmd_dipole(a, &cfg),
        Command::Spectrum(a) => cmd_spectrum(a, &cfg),
        Command::Scaling(a) => cmd_scaling(a, &cfg),
        Command::Regress(a) => cmd_regress(a),
    }
}

fn cmd_species(a: SpeciesArgs) -> Result<u8> {
    if a.dump {
        let payload = serde_json::to_value(all_species()).unwrap();
        let env = io::json_envelope("species", json!({"dump": true}), payload);
        emit_json(a.out.as_deref(), &env)?;
    } else {
        let mut text = format!("species table v{}\n", data_version());
        for s in all_species() {
            text.push_str(&format!(
                "{}: mass {} au, a0 {} au, alpha {} au, p-wave E_res {:.4} eV\n",
                s.name,
                s.mass,
                s.a0,
                s.alpha,
                hartree_to_ev(s.pwave.e_res)
            ));
        }
        emit_text(a.out.as_deref(), &text)?;
    }
    Ok(0)
}

fn cmd_radial(a: RadialArgs, cfg: &ConfigFile) -> Result<u8> {
    let sec = cfg.section("radial", &["species", "n", "l", "rmax", "points"])?;
    let species = required(sec.string(a.species, "species")?, "species")?;
    let n = required(sec.u64(a.n, "n")?, "n")?;
    let l = sec.u64(a.l, "l")?.unwrap_or(0);
    let (n, l) = validate_nl(n, l)?;
    let rmax = sec.f64(a.rmax, "rmax")?;
    let points = sec.u64(a.points, "points")?.unwrap_or(4000) as usize;
    let sp = species_lookup(&species)?;
    let state = RydbergState::new(sp, n, l)?;
    let wf = solve_radial(
        state,
        GridSpec {
            n_points: points,
            r_max: rmax,
        },
    )?;
    let params = json!({
        "species": sp.name, "n": n, "l": l,
        "rmax": wf.r_grid.last().unwrap(), "points": points,
        "energy_hartree": state.energy, "norm_error": wf.norm_error,
    });
    let text = io::xy_csv("radial", params, "r_au", "u", &wf.r_grid, &wf.u);
    emit_text(a.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_scatter(a: ScatterArgs, cfg: &ConfigFile) -> Result<u8> {
    let sec = cfg.section("scatter", &["species", "emax-ev", "points"])?;
    let species = required(sec.string(a.species, "species")?, "species")?;
    let emax_ev = sec.f64(a.emax_ev, "emax-ev")?.unwrap_or(0.05);
    let points = sec.u64(a.points, "points")?.unwrap_or(500) as usize;
    if emax_ev <= 0.0 || points < 2 {
        return Err(UlrmError::Usage(
            "--emax-ev must be positive and --points >= 2".into(),
        ));
    }
    let sp = species_lookup(&species)?;
    let prov = io::provenance(
        "scatter",
        json!({"species": sp.name, "emax_ev": emax_ev, "points": points}),
    );
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let e_ev = emax_ev * (i + 1) as f64 / points as f64;
        let e = ev_to_hartree(e_ev);
        let (delta, _) = scattering::p_wave_phase_shift(sp, e);
        rows.push(vec![
            io::fmt_sig(e_ev),
            io::fmt_sig(delta),
            io::fmt_sig(delta.tan()),
        ]);
    }
    let text = io::csv_document(&prov, &["E_eV", "delta_p", "tan_delta_p"], &rows);
    emit_text(a.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_pec(a: PecArgs, cfg: &ConfigFile) -> Result<u8> {
    let sec = cfg.section(
        "pec",
        &["rydberg", "state", "perturber", "pwave", "basis", "rmin", "rmax", "points"],
    )?;
    let rydberg = required(sec.string(a.rydberg, "rydberg")?, "rydberg")?;
    let state = required(sec.string(a.state, "state")?, "state")?;
    let perturber = required(sec.string(a.perturber, "perturber")?, "perturber")?;
    let pwave = match sec.string(a.pwave, "pwave")?.as_deref() {
        None | Some("off") => false,
        Some("on") => true,
        Some(other) => {
            return Err(UlrmError::Usage(format!(
                "--pwave must be on or off, got '{other}'"
            )))
        }
    };
    let basis_kind = sec.string(a.basis, "basis")?.unwrap_or_else(|| "extended".into());
    let (n, l) = parse_state_label(&state)?;
    let (n64, l64) = (n as u64, l as u64);
    validate_nl(n64, l64)?;
    let ryd = species_lookup(&rydberg)?;
    let pert = species_lookup(&perturber)?;

    let basis = match basis_kind.as_str() {
        "single" => BasisSet::single_state(ryd, n, l, None)?,
        "extended" => BasisSet::bracketing(ryd, n, l, None)?,
        "manifold" => BasisSet::degenerate_manifold(ryd, n, None)?,
        other => {
            return Err(UlrmError::Usage(format!(
                "--basis must be single, extended or manifold, got '{other}'"
            )))
        }
    };
    if pwave && basis_kind == "single" {
        return Err(UlrmError::Usage(
            "--pwave on needs the extended or manifold basis".into(),
        ));
    }
    let target_index = if basis_kind == "manifold" {
        0
    } else {
        basis.index_of(n, l).expect("target in basis")
    };
    let nu = basis.states[target_index].nu();
    let (def_lo, def_hi) = workflows::outer_well_window(nu);
    let rmin = sec.f64(a.rmin, "rmin")?.unwrap_or(def_lo);
    let rmax = sec.f64(a.rmax, "rmax")?.unwrap_or(def_hi);
    let points = sec.u64(a.points, "points")?.unwrap_or(1000) as usize;
    if !(rmin > 0.0 && rmax > rmin) || points < 4 {
        return Err(UlrmError::Usage(
            "need 0 < --rmin < --rmax and --points >= 4".into(),
        ));
    }
    let r_grid = linspace(rmin, rmax, points);
    let reference = basis.states[target_index].energy;
    let set = if basis_kind == "single" {
        pec_low_l_swave(&basis, pert, &r_grid)?
    } else {
        pec_diagonalize(&basis, pert, &r_grid, pwave, reference)?
    };
    let target_curve = set.curve_for_state(target_index).unwrap_or(0);
    let params = json!({
        "rydberg": ryd.name, "perturber": pert.name,
        "state": format!("{}{}", n, l_letter(l)),
        "pwave": pwave, "basis": basis_kind,
        "rmin": rmin, "rmax": rmax, "points": points,
        "target_curve": target_curve,
    });
    let text = io::pec_csv(&set, params);
    emit_text(a.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_vib(a: VibArgs, cfg: &ConfigFile) -> Result<u8> {
    let sec = cfg.section("vib", &["pec", "well", "mu", "levels", "curve"])?;
    let pec_path = required(
        a.pec.or(sec.string(None, "pec")?.map(PathBuf::from)),
        "pec",
    )?;
    let well_sel = sec.string(a.well, "well")?.unwrap_or_else(|| "outermost".into());
    let mu_sel = sec.string(a.mu, "mu")?.unwrap_or_else(|| "auto".into());
    let levels = sec.u64(a.levels, "levels")?.unwrap_or(2) as usize;
    let data = io::read_pec_csv(&pec_path)?;
    let curve = match sec.u64(a.curve, "curve")? {
        Some(c) => c as usize,
        None => data
            .parameters
            .get("target_curve")
            .and_then(serde_json::Value::as_u64)
            .unwrap_or(0) as usize,
    };
    if curve >= data.curves_mhz.len() {
        return Err(UlrmError::Usage(format!(
            "--curve {curve} out of range ({} curves)",
            data.curves_mhz.len()
        )));
    }
    let mu = match mu_sel.as_str() {
        "auto" => {
            let get = |key: &str| -> Result<f64> {
                let name = data
                    .parameters
                    .get(key)
                    .and_then(serde_json::Value::as_str)
                    .ok_or_else(|| {
                        UlrmError::Usage(format!(
                            "--mu auto needs '{key}' in the PEC provenance; pass --mu <value>"
                        ))
                    })?;
                Ok(species_lookup(name)?.mass)
            };
            reduced_mass(get("rydberg")?, get("perturber")?)
        }
        other => other
            .parse::<f64>()
            .map_err(|_| UlrmError::Usage(format!("--mu must be 'auto' or a number, got '{other}'")))?,
    };
    let v: Vec<f64> = data.curves_mhz[curve].iter().map(|&m| mhz_to_hartree(m)).collect();
    let asymptote = *v.last().unwrap();
    let wells = find_wells(&data.r_grid, &v, asymptote, default_depth_floor());
    let index = match well_sel.as_str() {
        "outermost" => 1usize,
        other => other
            .parse::<usize>()
            .map_err(|_| UlrmError::Usage(format!("--well must be 'outermost' or an index, got '{other}'")))?,
    };
    let well = wells
        .iter()
        .find(|w| w.index == index)
        .ok_or_else(|| UlrmError::InvalidState(format!("curve exposes no well {index}")))?;
    let solved = solve_vibrational(
        &data.r_grid,
        &v,
        well,
        0.0,
        mu,
        levels,
        VibrationalConfig::default(),
    )?;
    let params = json!({
        "pec": pec_path.display().to_string(),
        "well": index, "mu": mu, "levels": levels, "curve": curve,
    });
    let envelope = io::vib_levels_json(&solved, params);
    emit_json(a.out.as_deref(), &envelope)?;
    Ok(0)
}

fn cmd_density(a: DensityArgs, cfg: &ConfigFile) -> Result<u8> {
    let sec = cfg.section(
        "density",
        &["rydberg", "perturber", "n", "well", "extent", "nrho", "nz"],
    )?;
    let rydberg = required(sec.string(a.rydberg, "rydberg")?, "rydberg")?;
    let perturber = required(sec.string(a.perturber, "perturber")?, "perturber")?;
    let n64 = required(sec.u64(a.n, "n")?, "n")?;
    let (n, _) = validate_nl(n64, 3.min(n64 - 1))?;
    let well_index = sec.u64(a.well, "well")?.unwrap_or(1) as usize;
    let n2 = (n as f64) * (n as f64);
    let extent = sec.f64(a.extent, "extent")?.unwrap_or(2.2 * n2);
    let nrho = sec.u64(a.nrho, "nrho")?.unwrap_or(221) as usize;
    let nz = sec.u64(a.nz, "nz")?.unwrap_or(441) as usize;
    let ryd = species_lookup(&rydberg)?;
    let pert = species_lookup(&perturber)?;
    let tri = workflows::trilobite_curve(ryd, pert, n, 0.35 * n2, 2.05 * n2, 1100)?;
    let well = tri
        .wells
        .iter()
        .find(|w| w.index == well_index)
        .ok_or_else(|| UlrmError::InvalidState(format!("trilobite curve exposes no well {well_index}")))?;
    let basis = BasisSet::degenerate_manifold(ryd, n, None)?;
    let map = workflows::density_at(&basis, &tri.curve_set, tri.curve_index, well.i_min, extent, nrho, nz)?;
    let lobes = axial_lobe_count(
        &basis,
        &tri.curve_set.curves[tri.curve_index].eigvecs[well.i_min],
        well.r_min,
        2.3 * n2,
    )?;
    let prov = {
        let mut p = io::provenance(
            "density",
            json!({
                "rydberg": ryd.name, "perturber": pert.name, "n": n,
                "well": well_index, "extent": extent, "nrho": nrho, "nz": nz,
                "R_perturber": map.r_perturber,
            }),
        );
        p["lobe_count"] = json!(lobes);
        p
    };
    let mut rows = Vec::with_capacity(2 * nrho * nz);
    for (iz, &z) in map.z_grid.iter().enumerate() {
        for (ir, &rho) in map.rho_grid.iter().enumerate() {
            for phi in [0.0, std::f64::consts::PI] {
                if phi != 0.0 && ir == 0 {
                    continue; // the axis belongs to one half-plane only
                }
                rows.push(vec![
                    io::fmt_sig(rho),
                    io::fmt_sig(z),
                    io::fmt_sig(map.density[iz][ir]),
                    io::fmt_sig(phi),
                ]);
            }
        }
    }
    let text = io::csv_document(&prov, &["rho_au", "z_au", "value", "phi"], &rows);
    emit_text(a.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_dipole(a: DipoleArgs, cfg: &ConfigFile) -> Result<u8> {
    let sec = cfg.section("dipole", &["rydberg", "perturber", "state"])?;
    let rydberg = required(sec.string(a.rydberg, "rydberg")?, "rydberg")?;
    let perturber = required(sec.string(a.perturber, "perturber")?, "perturber")?;
    let state = required(sec.string(a.state, "state")?, "state")?;
    let (n, l) = parse_state_label(&state)?;
    validate_nl(n as u64, l as u64)?;
    let ryd = species_lookup(&rydberg)?;
    let pert = species_lookup(&perturber)?;
    let d = workflows::outermost_well_dipole(ryd, pert, n, l)?;
    let env = io::json_envelope(
        "dipole",
        json!({"rydberg": ryd.name, "perturber": pert.name, "state": state}),
        json!({"dipole_debye": d}),
    );
    emit_json(a.out.as_deref(), &env)?;
    Ok(0)
}

fn parse_quartet(spec: &str, n: u32, l: u32) -> Result<DimerEnergyQuartet> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 4 {
        return Err(UlrmError::Usage(
            "--quartet must be 'auto' or four comma-separated MHz values".into(),
        ));
    }
    let mut vals = [0.0; 4];
    for (i, p) in parts.iter().enumerate() {
        vals[i] = p
            .trim()
            .parse::<f64>()
            .map_err(|_| UlrmError::Usage(format!("bad quartet value '{p}'")))?;
    }
    Ok(DimerEnergyQuartet {
        a: vals[0],
        b: vals[1],
        c: vals[2],
        d: vals[3],
        n,
        l,
    })
}

fn cmd_spectrum(a: SpectrumArgs, cfg: &ConfigFile) -> Result<u8> {
    let sec = cfg.section(
        "spectrum",
        &["rydberg", "state", "max-atoms", "cap", "quartet", "broaden", "lambda-rb", "lambda-cs", "grid-points"],
    )?;
    let rydberg: RydbergSpecies = required(sec.string(a.rydberg, "rydberg")?, "rydberg")?.parse()?;
    let state = sec.string(a.state, "state")?.unwrap_or_else(|| "55S".into());
    let (n, l) = parse_state_label(&state)?;
    validate_nl(n as u64, l as u64)?;
    let max_atoms = sec.u64(a.max_atoms, "max-atoms")?.unwrap_or(4) as u32;
    let cap_mode = sec.string(a.cap, "cap")?.unwrap_or_else(|| "total".into());
    let cap = match cap_mode.as_str() {
        "total" => AtomCap::Total(max_atoms),
        "per-species" => AtomCap::PerSpecies(max_atoms),
        other => {
            return Err(UlrmError::Usage(format!(
                "--cap must be total or per-species, got '{other}'"
            )))
        }
    };
    let quartet_spec = sec.string(a.quartet, "quartet")?.unwrap_or_else(|| "auto".into());
    let quartet = if quartet_spec == "auto" {
        if l != 0 {
            return Err(UlrmError::Usage("--quartet auto supports nS states only".into()));
        }
        workflows::dimer_quartet(n)?
    } else {
        parse_quartet(&quartet_spec, n, l)?
    };
    quartet.validate()?;
    let broaden = sec.f64(a.broaden, "broaden")?.unwrap_or(0.05);
    let lambda_rb = sec.f64(a.lambda_rb, "lambda-rb")?;
    let lambda_cs = sec.f64(a.lambda_cs, "lambda-cs")?;
    let weights = match (lambda_rb, lambda_cs) {
        (None, None) => None,
        (rb, cs) => Some(PoissonWeights {
            lambda_rb: rb.unwrap_or(0.0),
            lambda_cs: cs.unwrap_or(0.0),
        }),
    };
    let lines = enumerate_lines(&quartet, rydberg, cap, weights)?;
    let grid_points = sec.u64(a.grid_points, "grid-points")?.unwrap_or(2000) as usize;
    let min_shift = lines.iter().map(|x| x.shift_mhz).fold(f64::INFINITY, f64::min);
    let pad = 10.0 * broaden;
    let grid = linspace(min_shift - pad, pad, grid_points.max(2));
    let rendered = render_spectrum(&lines, broaden, &grid)?;
    if rendered.coverage_warning {
        eprintln!("warning: some lines fall outside the sampled energy grid");
    }
    let params = json!({
        "rydberg": format!("{rydberg:?}"), "state": state,
        "max_atoms": max_atoms, "cap": cap_mode,
        "quartet": [quartet.a, quartet.b, quartet.c, quartet.d],
        "broaden_fwhm_mhz": broaden,
        "lambda_rb": lambda_rb, "lambda_cs": lambda_cs,
    });
    let csv = io::xy_csv(
        "spectrum",
        params.clone(),
        "energy_MHz",
        "intensity",
        &rendered.energy_mhz,
        &rendered.intensity,
    );
    emit_text(a.out.as_deref(), &csv)?;
    let sidecar = io::spectrum_lines_json(&lines, params);
    match a.out.as_deref() {
        Some(path) => {
            let json_path = path.with_extension("json");
            io::write_json(&json_path, &sidecar)?;
        }
        None => println!("{}", serde_json::to_string_pretty(&sidecar).unwrap()),
    }
    Ok(0)
}

fn cmd_scaling(a: ScalingArgs, cfg: &ConfigFile) -> Result<u8> {
    let sec = cfg.section("scaling", &["nlo", "nhi", "step"])?;
    let nlo = sec.u64(a.nlo, "nlo")?.unwrap_or(30) as u32;
    let nhi = sec.u64(a.nhi, "nhi")?.unwrap_or(50) as u32;
    let step = sec.u64(a.step, "step")?.unwrap_or(2) as u32;
    let combos = workflows::scaling_study(nlo, nhi, step)?;
    let prov = {
        let mut p = io::provenance("scaling", json!({"nlo": nlo, "nhi": nhi, "step": step}));
        let slopes: Vec<serde_json::Value> = combos
            .iter()
            .map(|c| json!({"rydberg": c.rydberg, "perturber": c.perturber, "slope": c.slope}))
            .collect();
        p["slopes"] = json!(slopes);
        p
    };
    let mut rows = Vec::new();
    for combo in &combos {
        for row in &combo.rows {
            rows.push(vec![
                combo.rydberg.clone(),
                combo.perturber.clone(),
                row.n.to_string(),
                io::fmt_sig(row.e_v0_mhz),
                row.e_v1_mhz.map(io::fmt_sig).unwrap_or_default(),
            ]);
        }
    }
    let text = io::csv_document(
        &prov,
        &["rydberg", "perturber", "n", "E_v0_MHz", "E_v1_MHz"],
        &rows,
    );
    emit_text(a.out.as_deref(), &text)?;
    Ok(0)
}

fn cmd_regress(a: RegressArgs) -> Result<u8> {
    let text = match &a.manifest {
        Some(path) => std::fs::read_to_string(path).map_err(|e| UlrmError::Io {
            path: path.display().to_string(),
            source: e,
        })?,
        None => regress::DEFAULT_MANIFEST.to_string(),
    };
    let manifest = regress::parse_manifest(&text)?;
    let all_passed = regress::run_manifest(&manifest, a.only.as_deref(), std::io::stdout())?;
    Ok(if all_passed { 0 } else { 3 })
}

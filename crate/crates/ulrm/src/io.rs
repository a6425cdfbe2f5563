//! Stable CSV/JSON serialization of result types.
//!
//! CSV files start with one '#'-prefixed line holding a JSON provenance
//! object (schema_version, command, data table version, run parameters),
//! then a header row, then data with 12 significant digits, '.' decimals
//! and '\n' line endings. Files are written atomically (temp + rename).

use crate::error::{Result, UlrmError};
use crate::pec::PotentialCurveSet;
use crate::species::data_version;
use crate::spectra::SpectrumLine;
use crate::units::hartree_to_mhz;
use crate::vibrational::VibrationalLevel;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fs;
use std::io::Write as _;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

/// 12 significant digits, plain decimal or exponent as shortest.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.11e}");
    // Re-render small-exponent values in plain notation for readability.
    let exp: i32 = s.split('e').nth(1).unwrap().parse().unwrap();
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let plain = format!("{x:.decimals$}");
        trim_zeros(&plain)
    } else {
        s
    }
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let t = s.trim_end_matches('0');
    t.trim_end_matches('.').to_string()
}

/// Write bytes via a temp file in the same directory, then rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |e: std::io::Error| UlrmError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp{}",
            path.file_name().and_then(|f| f.to_str()).unwrap_or("out"),
            std::process::id()
        )),
        None => Path::new(&format!(".ulrm.tmp{}", std::process::id())).to_path_buf(),
    };
    let mut f = fs::File::create(&tmp).map_err(io_err)?;
    f.write_all(bytes).map_err(io_err)?;
    f.sync_all().map_err(io_err)?;
    drop(f);
    fs::rename(&tmp, path).map_err(io_err)?;
    Ok(())
}

/// Provenance JSON object shared by all emitters.
pub fn provenance(command: &str, params: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "data_version": data_version(),
        "parameters": params,
    })
}

/// Versioned JSON envelope around an arbitrary payload.
pub fn json_envelope(command: &str, params: Value, payload: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "provenance": { "data_version": data_version(), "parameters": params },
        "payload": payload,
    })
}

/// Generic CSV body: provenance line, header, rows of fmt_sig fields.
pub fn csv_document(prov: &Value, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {prov}\n"));
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// PEC CSV: R_au, one MHz column per curve (relative to the curve set's
/// reference energy), and a trailing 0/1 reliability flag per radius.
pub fn pec_csv(set: &PotentialCurveSet, command_params: Value) -> String {
    let labels: Vec<String> = set.state_labels.clone();
    let prov = {
        let mut p = provenance("pec", command_params);
        p["reference_energy_hartree"] = json!(set.reference_energy);
        p["curve_labels"] = json!(labels);
        p
    };
    let mut header: Vec<String> = vec!["R_au".into()];
    for i in 0..set.curves.len() {
        header.push(format!("curve_{i}_MHz"));
    }
    header.push("reliable".into());
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let rel: Vec<Vec<f64>> = (0..set.curves.len())
        .map(|c| {
            set.relative_energies(c)
                .into_iter()
                .map(hartree_to_mhz)
                .collect()
        })
        .collect();
    let mut rows = Vec::with_capacity(set.r_grid.len());
    for (ir, &r) in set.r_grid.iter().enumerate() {
        let mut row = vec![fmt_sig(r)];
        for curve in &rel {
            row.push(fmt_sig(curve[ir]));
        }
        row.push(if set.reliable[ir] { "1".into() } else { "0".into() });
        rows.push(row);
    }
    csv_document(&prov, &header_refs, &rows)
}

/// A potential curve set read back from a PEC CSV.
#[derive(Debug)]
pub struct PecCsvData {
    pub r_grid: Vec<f64>,
    /// curves[c][ir], MHz relative to the reference energy.
    pub curves_mhz: Vec<Vec<f64>>,
    pub reliable: Vec<bool>,
    pub reference_energy_hartree: f64,
    pub curve_labels: Vec<String>,
    /// Run parameters echoed from the provenance header (for `--mu auto`).
    pub parameters: Value,
}

pub fn read_pec_csv(path: &Path) -> Result<PecCsvData> {
    let io_err = |e: std::io::Error| UlrmError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let text = fs::read_to_string(path).map_err(io_err)?;
    parse_pec_csv(&text).map_err(|e| match e {
        UlrmError::DataTable(msg) => {
            UlrmError::DataTable(format!("{}: {msg}", path.display()))
        }
        other => other,
    })
}

pub fn parse_pec_csv(text: &str) -> Result<PecCsvData> {
    let bad = |msg: &str| UlrmError::DataTable(msg.to_string());
    let mut lines = text.lines();
    let prov_line = lines.next().ok_or_else(|| bad("empty PEC file"))?;
    let prov_json = prov_line
        .strip_prefix('#')
        .ok_or_else(|| bad("missing provenance header line"))?
        .trim();
    let prov: Value = serde_json::from_str(prov_json)
        .map_err(|e| bad(&format!("bad provenance JSON: {e}")))?;
    let reference_energy_hartree = prov
        .get("reference_energy_hartree")
        .and_then(Value::as_f64)
        .ok_or_else(|| bad("provenance lacks reference_energy_hartree"))?;
    let curve_labels: Vec<String> = prov
        .get("curve_labels")
        .and_then(Value::as_array)
        .map(|a| {
            a.iter()
                .filter_map(Value::as_str)
                .map(String::from)
                .collect()
        })
        .unwrap_or_default();
    let header = lines.next().ok_or_else(|| bad("missing header row"))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.first() != Some(&"R_au") || cols.last() != Some(&"reliable") || cols.len() < 3 {
        return Err(bad("unexpected PEC header row"));
    }
    let n_curves = cols.len() - 2;
    let mut r_grid = Vec::new();
    let mut curves_mhz = vec![Vec::new(); n_curves];
    let mut reliable = Vec::new();
    for (ln, line) in lines.enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(bad(&format!("row {} has {} fields, expected {}", ln + 3, fields.len(), cols.len())));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| bad(&format!("bad numeric field '{s}'")))
        };
        r_grid.push(parse(fields[0])?);
        for c in 0..n_curves {
            curves_mhz[c].push(parse(fields[1 + c])?);
        }
        reliable.push(fields[cols.len() - 1].trim() != "0");
    }
    if r_grid.len() < 4 {
        return Err(bad("PEC file has fewer than 4 radii"));
    }
    Ok(PecCsvData {
        r_grid,
        curves_mhz,
        reliable,
        reference_energy_hartree,
        curve_labels,
        parameters: prov.get("parameters").cloned().unwrap_or(Value::Null),
    })
}

/// Vibrational levels as a JSON array sorted by v.
#[derive(Debug, Serialize, Deserialize)]
pub struct VibLevelRecord {
    pub v: usize,
    pub energy_hartree: f64,
    pub energy_shift_mhz: f64,
    pub well_r_min: f64,
    pub well_depth_mhz: f64,
}

pub fn vib_levels_json(levels: &[VibrationalLevel], params: Value) -> Value {
    let mut recs: Vec<VibLevelRecord> = levels
        .iter()
        .map(|l| VibLevelRecord {
            v: l.v,
            energy_hartree: l.energy,
            energy_shift_mhz: l.energy_shift_mhz,
            well_r_min: l.well.r_min,
            well_depth_mhz: hartree_to_mhz(l.well.depth),
        })
        .collect();
    recs.sort_by_key(|r| r.v);
    json_envelope("vib", params, serde_json::to_value(recs).unwrap())
}

/// Stick lines as the sidecar JSON for a rendered spectrum.
pub fn spectrum_lines_json(lines: &[SpectrumLine], params: Value) -> Value {
    let payload: Vec<Value> = lines
        .iter()
        .map(|l| {
            json!({
                "i": l.i,
                "j": l.j,
                "shift_MHz": l.shift_mhz,
                "weight": l.weight,
            })
        })
        .collect();
    json_envelope("spectrum", params, Value::Array(payload))
}

/// Two-column CSV (e.g. spectrum intensity, scatter quantities).
pub fn xy_csv(command: &str, params: Value, x_name: &str, y_name: &str, x: &[f64], y: &[f64]) -> String {
    let prov = provenance(command, params);
    let rows: Vec<Vec<String>> = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| vec![fmt_sig(a), fmt_sig(b)])
        .collect();
    csv_document(&prov, &[x_name, y_name], &rows)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    atomic_write(path, text.as_bytes())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON serialization");
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

//! Optional TOML run-configuration files. Each subcommand reads defaults
//! from its own `[section]`; explicit CLI flags always win. Unknown keys are
//! rejected so typos fail loudly instead of silently using defaults.

use crate::error::{Result, UlrmError};
use std::path::Path;
use toml::Value;

#[derive(Debug, Default)]
pub struct ConfigFile {
    root: Option<toml::Table>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| UlrmError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        let root: toml::Table = text
            .parse()
            .map_err(|e| UlrmError::Usage(format!("config {}: {e}", path.display())))?;
        Ok(Self { root: Some(root) })
    }

    /// Validate that the named section only contains `allowed` keys.
    pub fn section(&self, command: &str, allowed: &[&str]) -> Result<Section<'_>> {
        let table = match &self.root {
            None => None,
            Some(root) => match root.get(command) {
                None => None,
                Some(Value::Table(t)) => {
                    for key in t.keys() {
                        if !allowed.contains(&key.as_str()) {
                            return Err(UlrmError::Usage(format!(
                                "config section [{command}]: unknown key '{key}'"
                            )));
                        }
                    }
                    Some(t)
                }
                Some(_) => {
                    return Err(UlrmError::Usage(format!(
                        "config entry '{command}' must be a table"
                    )))
                }
            },
        };
        // Top-level keys other than known command sections are rejected too.
        if let Some(root) = &self.root {
            for key in root.keys() {
                if !crate::config::KNOWN_SECTIONS.contains(&key.as_str()) {
                    return Err(UlrmError::Usage(format!(
                        "config: unknown section or key '{key}'"
                    )));
                }
            }
        }
        Ok(Section { command: command.to_string(), table })
    }
}

pub const KNOWN_SECTIONS: &[&str] = &[
    "species", "radial", "scatter", "pec", "vib", "density", "dipole", "spectrum", "scaling",
    "regress",
];

#[derive(Debug)]
pub struct Section<'a> {
    command: String,
    table: Option<&'a toml::Table>,
}

impl Section<'_> {
    fn get(&self, key: &str) -> Option<&Value> {
        self.table.and_then(|t| t.get(key))
    }

    fn type_err(&self, key: &str, want: &str) -> UlrmError {
        UlrmError::Usage(format!(
            "config [{}].{key}: expected {want}",
            self.command
        ))
    }

    /// CLI value wins; otherwise the config value; otherwise None.
    pub fn f64(&self, cli: Option<f64>, key: &str) -> Result<Option<f64>> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.get(key) {
            None => Ok(None),
            Some(Value::Float(v)) => Ok(Some(*v)),
            Some(Value::Integer(v)) => Ok(Some(*v as f64)),
            Some(_) => Err(self.type_err(key, "a number")),
        }
    }

    pub fn u64(&self, cli: Option<u64>, key: &str) -> Result<Option<u64>> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.get(key) {
            None => Ok(None),
            Some(Value::Integer(v)) if *v >= 0 => Ok(Some(*v as u64)),
            Some(_) => Err(self.type_err(key, "a non-negative integer")),
        }
    }

    pub fn string(&self, cli: Option<String>, key: &str) -> Result<Option<String>> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(v)) => Ok(Some(v.clone())),
            Some(_) => Err(self.type_err(key, "a string")),
        }
    }

    pub fn bool(&self, cli: Option<bool>, key: &str) -> Result<Option<bool>> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.get(key) {
            None => Ok(None),
            Some(Value::Boolean(v)) => Ok(Some(*v)),
            Some(_) => Err(self.type_err(key, "a boolean")),
        }
    }
}

/// Shared parameter validation: Rydberg regime and sane l.
pub fn validate_nl(n: u64, l: u64) -> Result<(u32, u32)> {
    if n < 5 {
        return Err(UlrmError::Usage(format!("--n {n}: need n >= 5")));
    }
    if n > 150 {
        return Err(UlrmError::Usage(format!("--n {n}: need n <= 150")));
    }
    if l >= n {
        return Err(UlrmError::Usage(format!("--l {l} must be below n = {n}")));
    }
    Ok((n as u32, l as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_cfg(body: &str) -> (tempfile::TempDir, std::path::PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(body.as_bytes()).unwrap();
        (dir, path)
    }

    #[test]
    fn cli_overrides_config() {
        let (_d, path) = write_cfg("[pec]\nrmax = 3200.0\n");
        let cfg = ConfigFile::load(Some(&path)).unwrap();
        let sec = cfg.section("pec", &["rmax", "rmin"]).unwrap();
        assert_eq!(sec.f64(Some(3000.0), "rmax").unwrap(), Some(3000.0));
        assert_eq!(sec.f64(None, "rmax").unwrap(), Some(3200.0));
        assert_eq!(sec.f64(None, "rmin").unwrap(), None);
    }

    #[test]
    fn unknown_key_rejected() {
        let (_d, path) = write_cfg("[pec]\nrmx = 3200.0\n");
        let cfg = ConfigFile::load(Some(&path)).unwrap();
        let err = cfg.section("pec", &["rmax"]).unwrap_err();
        assert!(matches!(err, UlrmError::Usage(_)));
    }

    #[test]
    fn unknown_section_rejected() {
        let (_d, path) = write_cfg("[nonsense]\nx = 1\n");
        let cfg = ConfigFile::load(Some(&path)).unwrap();
        assert!(cfg.section("pec", &["rmax"]).is_err());
    }

    #[test]
    fn integers_coerce_to_floats() {
        let (_d, path) = write_cfg("[pec]\nrmax = 3200\n");
        let cfg = ConfigFile::load(Some(&path)).unwrap();
        let sec = cfg.section("pec", &["rmax"]).unwrap();
        assert_eq!(sec.f64(None, "rmax").unwrap(), Some(3200.0));
    }

    #[test]
    fn nl_validation() {
        assert!(validate_nl(3, 0).is_err());
        assert!(validate_nl(35, 40).is_err());
        assert_eq!(validate_nl(35, 0).unwrap(), (35, 0));
    }

    #[test]
    fn missing_config_is_default() {
        let cfg = ConfigFile::load(None).unwrap();
        let sec = cfg.section("vib", &["levels"]).unwrap();
        assert_eq!(sec.u64(None, "levels").unwrap(), None);
    }
}

//! Run configuration: preset resolution, flat `key = value` config files,
//! flag overlays, and the run manifest.
//!
//! A manifest is itself a valid config file (the `version` and `hash.*`
//! keys are informational and skipped on load), so a run can always be
//! reproduced from the manifest it wrote.

use std::fmt::Write as _;
use std::path::Path;

use twoslit::ensemble::{Scenario, ScenarioConfig, Weighting};
use twoslit::errors::ConfigError;
use twoslit::integrator::IntegrationConfig;

/// Everything a run needs: placement + model parameters, integration
/// settings, and the analysis window.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    pub scenario: ScenarioConfig,
    pub integration: IntegrationConfig,
    pub bins: usize,
    pub z_min: f64,
    pub z_max: f64,
}

impl RunConfig {
    pub fn from_preset(s: Scenario) -> RunConfig {
        RunConfig {
            scenario: ScenarioConfig::preset(s),
            integration: s.integration_preset(),
            bins: 100,
            z_min: -40.0,
            z_max: 40.0,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scenario.validate()?;
        self.integration.validate()?;
        if self.bins == 0 {
            return Err(ConfigError::new("bins", "must be >= 1"));
        }
        if !(self.z_min < self.z_max) || !self.z_min.is_finite() || !self.z_max.is_finite() {
            return Err(ConfigError::new(
                "z_window",
                format!(
                    "window must satisfy z_min < z_max (got [{}, {}])",
                    self.z_min, self.z_max
                ),
            ));
        }
        Ok(())
    }

    /// Apply one `key = value` pair. `scenario`, `version`, and `hash.*`
    /// are handled by the caller.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "n_per_hole" => self.scenario.n_per_hole = p_usize(key, value)?,
            "delta" => self.scenario.delta = p_f64(key, value)?,
            "radius_a" => self.scenario.radius_a = p_f64(key, value)?,
            "weighting" => {
                self.scenario.weighting = Weighting::parse(value).ok_or_else(|| {
                    ConfigError::new(key, format!("unknown weighting '{value}'"))
                })?
            }
            "m_quadrature" => self.scenario.m_quadrature = p_usize(key, value)?,
            "seed" => self.scenario.seed = p_u64(key, value)?,
            "sigma0" => self.scenario.sigma0 = p_f64(key, value)?,
            "kx" => self.scenario.kx = p_f64(key, value)?,
            "z0" => self.scenario.z0 = p_f64(key, value)?,
            "hbar_over_m" => self.scenario.hbar_over_m = p_f64(key, value)?,
            "k" => self.scenario.k = p_f64(key, value)?,
            "singular_radius" => self.scenario.singular_radius = p_f64(key, value)?,
            "dt" => self.integration.dt = p_f64(key, value)?,
            "t_max" => self.integration.t_max = p_f64(key, value)?,
            "screen_x" => self.integration.screen_x = p_f64(key, value)?,
            "record_stride" => self.integration.record_stride = p_u64(key, value)?,
            "bins" => self.bins = p_usize(key, value)?,
            "z_min" => self.z_min = p_f64(key, value)?,
            "z_max" => self.z_max = p_f64(key, value)?,
            _ => return Err(ConfigError::new(key, "unknown configuration key")),
        }
        Ok(())
    }

    /// Render the full resolved configuration as manifest text. `hashes`
    /// are (file name, sha256 hex) pairs for the data files just written.
    pub fn manifest(&self, version: &str, hashes: &[(String, String)]) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "version = {version}");
        let _ = writeln!(s, "scenario = {}", self.scenario.scenario.label());
        let _ = writeln!(s, "n_per_hole = {}", self.scenario.n_per_hole);
        let _ = writeln!(s, "delta = {}", self.scenario.delta);
        let _ = writeln!(s, "radius_a = {}", self.scenario.radius_a);
        let _ = writeln!(s, "weighting = {}", self.scenario.weighting.label());
        let _ = writeln!(s, "m_quadrature = {}", self.scenario.m_quadrature);
        let _ = writeln!(s, "seed = {}", self.scenario.seed);
        let _ = writeln!(s, "sigma0 = {}", self.scenario.sigma0);
        let _ = writeln!(s, "kx = {}", self.scenario.kx);
        let _ = writeln!(s, "z0 = {}", self.scenario.z0);
        let _ = writeln!(s, "hbar_over_m = {}", self.scenario.hbar_over_m);
        let _ = writeln!(s, "k = {}", self.scenario.k);
        let _ = writeln!(s, "singular_radius = {}", self.scenario.singular_radius);
        let _ = writeln!(s, "dt = {}", self.integration.dt);
        let _ = writeln!(s, "t_max = {}", self.integration.t_max);
        let _ = writeln!(s, "screen_x = {}", self.integration.screen_x);
        let _ = writeln!(s, "record_stride = {}", self.integration.record_stride);
        let _ = writeln!(s, "bins = {}", self.bins);
        let _ = writeln!(s, "z_min = {}", self.z_min);
        let _ = writeln!(s, "z_max = {}", self.z_max);
        for (name, hex) in hashes {
            let _ = writeln!(s, "hash.{name} = {hex}");
        }
        s
    }
}

fn p_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse()
        .map_err(|_| ConfigError::new(key, format!("not a number: '{v}'")))
}

fn p_usize(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse()
        .map_err(|_| ConfigError::new(key, format!("not a non-negative integer: '{v}'")))
}

fn p_u64(key: &str, v: &str) -> Result<u64, ConfigError> {
    v.parse()
        .map_err(|_| ConfigError::new(key, format!("not a non-negative integer: '{v}'")))
}

/// Parse a flat config file into ordered (key, value) pairs. Blank lines
/// and `#` comments are skipped.
pub fn read_kv_file(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::new(
                "config",
                format!("line {}: expected 'key = value', got '{line}'", i + 1),
            ));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Build a RunConfig from an optional preset, an optional config file, and
/// the precedence preset < file < flags (flags are applied by the caller).
pub fn resolve_base(
    preset: Option<&str>,
    config_path: Option<&Path>,
) -> Result<RunConfig, ConfigError> {
    let preset_scenario = match preset {
        Some(label) => Some(
            Scenario::parse(label)
                .ok_or_else(|| ConfigError::new("preset", format!("unknown preset '{label}'")))?,
        ),
        None => None,
    };
    let file_pairs = match config_path {
        Some(p) => read_kv_file(p)?,
        None => Vec::new(),
    };
    let file_scenario = match file_pairs.iter().find(|(k, _)| k == "scenario") {
        Some((_, label)) => Some(Scenario::parse(label).ok_or_else(|| {
            ConfigError::new("scenario", format!("unknown scenario '{label}'"))
        })?),
        None => None,
    };
    // The file's scenario wins over the preset flag (the file is the more
    // specific artifact); either source must name one.
    let scenario = file_scenario.or(preset_scenario).ok_or_else(|| {
        ConfigError::new(
            "scenario",
            "no scenario given: pass --preset or a --config file with a scenario key",
        )
    })?;
    let mut cfg = RunConfig::from_preset(scenario);
    for (key, value) in &file_pairs {
        if key == "scenario" || key == "version" || key.starts_with("hash.") {
            continue;
        }
        cfg.apply_kv(key, value)?;
    }
    Ok(cfg)
}

//! Strict run-configuration reader: flat `key = value` lines plus
//! `[section]` headers, comments with `#`. Unknown keys and malformed
//! lines are errors, not warnings.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub geometry: String,
    pub surface: String,
    pub order: usize,
    pub form: String,
    pub seed: u64,
    pub timing: bool,
    pub gauge: bool,
    pub probe_points: usize,
    pub report_path: Option<String>,
    pub mesh_dump: Option<String>,
    pub grid: GridConfig,
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridConfig {
    pub u0: f64,
    pub u1: f64,
    pub v0: f64,
    pub v1: f64,
    pub nu: usize,
    pub nv: usize,
    pub periodic_u: bool,
    pub periodic_v: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            u0: 0.2,
            u1: 5.8,
            v0: -1.0,
            v1: 1.0,
            nu: 16,
            nv: 12,
            periodic_u: false,
            periodic_v: false,
        }
    }
}

#[derive(Debug)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config line {}: {}", self.line, self.message)
    }
}

fn err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig {
            geometry: String::new(),
            surface: String::new(),
            order: 2,
            form: "zero".into(),
            seed: 42,
            timing: true,
            gauge: false,
            probe_points: 0,
            report_path: None,
            mesh_dump: None,
            grid: GridConfig::default(),
            tolerances: BTreeMap::new(),
        };
        let mut section = String::new();
        let mut saw_geometry = false;
        let mut saw_surface = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| err(line_no, "unterminated section header"))?;
                match name {
                    "grid" | "tolerances" => section = name.to_string(),
                    other => return Err(err(line_no, format!("unknown section `{other}`"))),
                }
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(line_no, "expected `key = value`"))?;
            let key = key.trim();
            let value = value.trim();
            cfg.apply(&section, key, value, line_no)?;
            match key {
                "geometry" => saw_geometry = true,
                "surface" => saw_surface = true,
                _ => {}
            }
        }
        if !saw_geometry {
            return Err(err(0, "missing required key `geometry`"));
        }
        if !saw_surface {
            return Err(err(0, "missing required key `surface`"));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Apply a `--override key=value` (section keys written `grid.nu`).
    pub fn apply_override(&mut self, spec: &str) -> Result<(), ConfigError> {
        let (key, value) = spec
            .split_once('=')
            .ok_or_else(|| err(0, format!("override `{spec}` is not key=value")))?;
        let key = key.trim();
        let value = value.trim();
        if let Some(rest) = key.strip_prefix("grid.") {
            self.apply("grid", rest, value, 0)?;
        } else if let Some(rest) = key.strip_prefix("tolerances.") {
            self.apply("tolerances", rest, value, 0)?;
        } else {
            self.apply("", key, value, 0)?;
        }
        self.validate()
    }

    fn apply(
        &mut self,
        section: &str,
        key: &str,
        value: &str,
        line: usize,
    ) -> Result<(), ConfigError> {
        let parse_f64 = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| err(line, format!("`{key}` expects a number, got `{v}`")))
        };
        let parse_usize = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| err(line, format!("`{key}` expects an integer, got `{v}`")))
        };
        let parse_bool = |v: &str| match v {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(err(line, format!("`{key}` expects true/false, got `{v}`"))),
        };
        match section {
            "" => match key {
                "geometry" => self.geometry = value.into(),
                "surface" => self.surface = value.into(),
                "order" => self.order = parse_usize(value)?,
                "form" => self.form = value.into(),
                "seed" => {
                    self.seed = value.parse::<u64>().map_err(|_| {
                        err(line, format!("`seed` expects an integer, got `{value}`"))
                    })?
                }
                "timing" => self.timing = parse_bool(value)?,
                "gauge" => self.gauge = parse_bool(value)?,
                "probe_points" => self.probe_points = parse_usize(value)?,
                "report" => self.report_path = Some(value.into()),
                "mesh_dump" => self.mesh_dump = Some(value.into()),
                other => return Err(err(line, format!("unknown key `{other}`"))),
            },
            "grid" => match key {
                "u0" => self.grid.u0 = parse_f64(value)?,
                "u1" => self.grid.u1 = parse_f64(value)?,
                "v0" => self.grid.v0 = parse_f64(value)?,
                "v1" => self.grid.v1 = parse_f64(value)?,
                "nu" => self.grid.nu = parse_usize(value)?,
                "nv" => self.grid.nv = parse_usize(value)?,
                "periodic_u" => self.grid.periodic_u = parse_bool(value)?,
                "periodic_v" => self.grid.periodic_v = parse_bool(value)?,
                other => return Err(err(line, format!("unknown key `grid.{other}`"))),
            },
            "tolerances" => {
                let allowed = [
                    "closure",
                    "maurer_cartan",
                    "invariant",
                    "chart",
                    "triviality",
                    "containment",
                ];
                if !allowed.contains(&key) {
                    return Err(err(line, format!("unknown key `tolerances.{key}`")));
                }
                self.tolerances.insert(key.into(), parse_f64(value)?);
            }
            _ => unreachable!(),
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !matches!(
            self.geometry.as_str(),
            "projective" | "conformal" | "lie_sphere_33" | "lie_sphere_42"
        ) {
            return Err(err(0, format!("unknown geometry `{}`", self.geometry)));
        }
        if !(1..=3).contains(&self.order) {
            return Err(err(
                0,
                format!("order must be 1, 2 or 3, got {}", self.order),
            ));
        }
        let form_ok = matches!(
            self.form.as_str(),
            "builtin_isothermic" | "theta_sampler" | "zero"
        ) || self.form.starts_with("table:");
        if !form_ok {
            return Err(err(0, format!("unknown form source `{}`", self.form)));
        }
        Ok(())
    }

    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }
}

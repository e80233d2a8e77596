//! Run configuration: documented defaults, overridden by a config file,
//! overridden by command-line flags.
//!
//! Every source is reduced to `key = value` pairs and fed through one strict
//! setter, so unknown keys and malformed values fail the same way whether they
//! come from a file or a flag.
//!
//! | key | meaning | default |
//! |---|---|---|
//! | `basis.n_max` | oscillator levels per axis | 16 |
//! | `basis.margin` | top levels excluded from interior checks | 2 |
//! | `basis.osc_length` | oscillator length when `B = 0` | 1 |
//! | `phys.m0`, `phys.e`, `phys.hbar` | mass, charge, Planck constant | 1, 1, 1 |
//! | `phys.c` | speed of light for single-`c` commands | 50 |
//! | `phys.c_list` | sweep for `convergence` | 10,20,40,80 |
//! | `potential.B` | symmetric-gauge field | 1 |
//! | `potential.a0` | gradient of `A₀` (`g_x,g_y`) | 0,0 |
//! | `potential.field_scaling` | `fixed-cyclotron` or `fixed-field` | fixed-cyclotron |
//! | `nc.theta` | `θ` for `series` | 0.001 |
//! | `nc.theta_list`, `nc.eta_list` | grids for `nc-algebra`, `nc-sweep` | 0,0.0001,0.001 / 0,0.001 |
//! | `series.order` | Maclaurin order in `nc-sweep` | 8 |
//! | `series.orders` | orders compared in `series` | 0..8 |
//! | `levels` | number of levels reported | 4 |
//! | `qtheta_mode` | `sigma` or `upper-block` | sigma |
//! | `output.path`, `output.format` | destination, `csv` or `json` | stdout, csv |
//! | `seed`, `pairs` | random Pauli-identity checks | 7, 100 |

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use clap::ValueEnum;
use ncdirac::hamiltonians::QThetaMode;
use ncdirac::limits::FieldScaling;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Clifford relations, Pauli product identity, canonical commutators.
    AlgebraCheck,
    /// Bopp-shifted commutators over a (θ, η) grid.
    NcAlgebra,
    /// Dirac and Pauli Landau levels against closed forms.
    Landau,
    /// Dirac → Pauli convergence over a sweep in c.
    Convergence,
    /// NC Dirac and NC Pauli level shifts over a (θ, η) grid.
    NcSweep,
    /// Maclaurin-series truncation error of the NC Pauli operator.
    Series,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::AlgebraCheck => "algebra-check",
            Command::NcAlgebra => "nc-algebra",
            Command::Landau => "landau",
            Command::Convergence => "convergence",
            Command::NcSweep => "nc-sweep",
            Command::Series => "series",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisConfig {
    pub n_max: usize,
    pub margin: usize,
    pub osc_length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysConfig {
    pub m0: f64,
    pub c: f64,
    pub c_list: Vec<f64>,
    pub e: f64,
    pub hbar: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialConfig {
    #[serde(rename = "B")]
    pub b: f64,
    pub a0: [f64; 2],
    pub field_scaling: FieldScaling,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NcConfig {
    pub theta: f64,
    pub theta_list: Vec<f64>,
    pub eta_list: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub order: u32,
    pub orders: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputConfig {
    pub path: Option<String>,
    pub format: Format,
}

/// Fully resolved configuration of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub basis: BasisConfig,
    pub phys: PhysConfig,
    pub potential: PotentialConfig,
    pub nc: NcConfig,
    pub series: SeriesConfig,
    pub levels: usize,
    pub qtheta_mode: QThetaMode,
    pub output: OutputConfig,
    pub seed: u64,
    pub pairs: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("invalid value {value:?} for `{key}`: {reason}")]
    Malformed { key: String, value: String, reason: String },
    #[error("`{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("`{key}` is set twice in {source_name}")]
    Duplicate { key: String, source_name: String },
    #[error("cannot read config file {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("config file {path}, line {line}: {reason}")]
    Syntax { path: String, line: usize, reason: String },
}

impl ConfigError {
    fn invalid(key: &str, reason: impl Into<String>) -> Self {
        ConfigError::Invalid { key: key.into(), reason: reason.into() }
    }
}

/// Every accepted key, in documentation order.
pub const KEYS: &[&str] = &[
    "basis.n_max",
    "basis.margin",
    "basis.osc_length",
    "phys.m0",
    "phys.c",
    "phys.c_list",
    "phys.e",
    "phys.hbar",
    "potential.B",
    "potential.a0",
    "potential.field_scaling",
    "nc.theta",
    "nc.theta_list",
    "nc.eta_list",
    "series.order",
    "series.orders",
    "levels",
    "qtheta_mode",
    "output.path",
    "output.format",
    "seed",
    "pairs",
];

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        Self {
            command,
            basis: BasisConfig { n_max: 16, margin: 2, osc_length: 1.0 },
            phys: PhysConfig { m0: 1.0, c: 50.0, c_list: vec![10.0, 20.0, 40.0, 80.0], e: 1.0, hbar: 1.0 },
            potential: PotentialConfig { b: 1.0, a0: [0.0, 0.0], field_scaling: FieldScaling::FixedCyclotron },
            nc: NcConfig { theta: 1e-3, theta_list: vec![0.0, 1e-4, 1e-3], eta_list: vec![0.0, 1e-3] },
            series: SeriesConfig { order: 8, orders: (0..=8).collect() },
            levels: 4,
            qtheta_mode: QThetaMode::Sigma,
            output: OutputConfig { path: None, format: Format::Csv },
            seed: 7,
            pairs: 100,
        }
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key {
            "basis.n_max" => self.basis.n_max = parse(key, value)?,
            "basis.margin" => self.basis.margin = parse(key, value)?,
            "basis.osc_length" => self.basis.osc_length = parse_f64(key, value)?,
            "phys.m0" => self.phys.m0 = parse_f64(key, value)?,
            "phys.c" => self.phys.c = parse_f64(key, value)?,
            "phys.c_list" => self.phys.c_list = parse_f64_list(key, value)?,
            "phys.e" => self.phys.e = parse_f64(key, value)?,
            "phys.hbar" => self.phys.hbar = parse_f64(key, value)?,
            "potential.B" => self.potential.b = parse_f64(key, value)?,
            "potential.a0" => {
                let v = parse_f64_list(key, value)?;
                let [gx, gy] = v[..] else {
                    return Err(malformed(key, value, "expected two comma-separated numbers"));
                };
                self.potential.a0 = [gx, gy];
            }
            "potential.field_scaling" => {
                self.potential.field_scaling = match value {
                    "fixed-field" => FieldScaling::FixedField,
                    "fixed-cyclotron" => FieldScaling::FixedCyclotron,
                    _ => return Err(malformed(key, value, "expected fixed-field or fixed-cyclotron")),
                }
            }
            "nc.theta" => self.nc.theta = parse_f64(key, value)?,
            "nc.theta_list" => self.nc.theta_list = parse_f64_list(key, value)?,
            "nc.eta_list" => self.nc.eta_list = parse_f64_list(key, value)?,
            "series.order" => self.series.order = parse(key, value)?,
            "series.orders" => self.series.orders = parse_list(key, value)?,
            "levels" => self.levels = parse(key, value)?,
            "qtheta_mode" => {
                self.qtheta_mode = QThetaMode::from_str(value).map_err(|_| malformed(key, value, "expected sigma or upper-block"))?
            }
            "output.path" => self.output.path = (!value.is_empty()).then(|| value.to_string()),
            "output.format" => {
                self.output.format = match value {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return Err(malformed(key, value, "expected csv or json")),
                }
            }
            "seed" => self.seed = parse(key, value)?,
            "pairs" => self.pairs = parse(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Range and consistency checks, naming the offending key.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::invalid(key, format!("must be positive and finite, got {v}")))
            }
        };
        let finite = |key: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::invalid(key, format!("must be finite, got {v}")))
            }
        };
        if self.basis.n_max < ncdirac::phase_space::MIN_LEVELS {
            return Err(ConfigError::invalid(
                "n_max",
                format!("below minimum {}, got {}", ncdirac::phase_space::MIN_LEVELS, self.basis.n_max),
            ));
        }
        if self.basis.margin >= self.basis.n_max {
            return Err(ConfigError::invalid("margin", format!("must be below n_max = {}", self.basis.n_max)));
        }
        positive("osc_length", self.basis.osc_length)?;
        positive("m0", self.phys.m0)?;
        positive("c", self.phys.c)?;
        positive("hbar", self.phys.hbar)?;
        finite("e", self.phys.e)?;
        finite("B", self.potential.b)?;
        finite("a0", self.potential.a0[0])?;
        finite("a0", self.potential.a0[1])?;
        finite("theta", self.nc.theta)?;
        for &c in &self.phys.c_list {
            positive("c_list", c)?;
        }
        for &t in &self.nc.theta_list {
            finite("theta_list", t)?;
        }
        for &e in &self.nc.eta_list {
            finite("eta_list", e)?;
        }
        match self.command {
            Command::Convergence => {
                if self.phys.c_list.len() < 3 {
                    return Err(ConfigError::invalid("c_list", "needs at least three values"));
                }
                if self.phys.c_list.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(ConfigError::invalid("c_list", "must be strictly increasing"));
                }
            }
            Command::NcAlgebra | Command::NcSweep => {
                if self.nc.theta_list.is_empty() {
                    return Err(ConfigError::invalid("theta_list", "must not be empty"));
                }
                if self.nc.eta_list.is_empty() {
                    return Err(ConfigError::invalid("eta_list", "must not be empty"));
                }
            }
            Command::Series => {
                if self.series.orders.is_empty() {
                    return Err(ConfigError::invalid("orders", "must not be empty"));
                }
            }
            Command::Landau => {
                if self.potential.b == 0.0 || self.phys.e == 0.0 {
                    return Err(ConfigError::invalid("B", "Landau levels need a nonzero field and charge"));
                }
                if self.potential.a0 != [0.0, 0.0] {
                    return Err(ConfigError::invalid("a0", "the Landau oracles assume A0 = 0"));
                }
            }
            Command::AlgebraCheck => {}
        }
        Ok(())
    }
}

fn malformed(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Malformed { key: key.into(), value: value.into(), reason: reason.into() }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| malformed(key, value, e.to_string()))
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = parse(key, value)?;
    if !v.is_finite() {
        return Err(malformed(key, value, "must be finite"));
    }
    Ok(v)
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: fmt::Display,
{
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|s| parse(key, s.trim())).collect()
}

fn parse_f64_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    let v: Vec<f64> = parse_list(key, value)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(malformed(key, value, "entries must be finite"));
    }
    Ok(v)
}

/// Reads `key = value` lines (`#` starts a comment) or a JSON object whose
/// nesting maps onto dotted keys.
pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io { path: name.clone(), reason: e.to_string() })?;
    let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
    let pairs = if is_json { parse_json_config(&text, &name)? } else { parse_kv_config(&text, &name)? };
    let mut seen = BTreeMap::new();
    for (k, _) in &pairs {
        if seen.insert(k.clone(), ()).is_some() {
            return Err(ConfigError::Duplicate { key: k.clone(), source_name: name });
        }
    }
    Ok(pairs)
}

pub fn parse_kv_config(text: &str, name: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { path: name.into(), line: i + 1, reason: "expected key = value".into() });
        };
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::Syntax { path: name.into(), line: i + 1, reason: "empty key".into() });
        }
        out.push((k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

pub fn parse_json_config(text: &str, name: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let root: serde_json::Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax {
        path: name.into(),
        line: e.line(),
        reason: e.to_string(),
    })?;
    let serde_json::Value::Object(map) = root else {
        return Err(ConfigError::Syntax { path: name.into(), line: 1, reason: "top level must be an object".into() });
    };
    let mut out = Vec::new();
    flatten("", &serde_json::Value::Object(map), &mut out, name)?;
    Ok(out)
}

fn flatten(prefix: &str, v: &serde_json::Value, out: &mut Vec<(String, String)>, name: &str) -> Result<(), ConfigError> {
    use serde_json::Value;
    let scalar = |v: &Value| -> Option<String> {
        match v {
            Value::Number(n) => Some(n.to_string()),
            Value::String(s) => Some(s.clone()),
            Value::Bool(b) => Some(b.to_string()),
            _ => None,
        }
    };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out, name)?;
            }
        }
        Value::Array(items) => {
            let parts: Option<Vec<String>> = items.iter().map(scalar).collect();
            let parts = parts.ok_or_else(|| ConfigError::Syntax {
                path: name.into(),
                line: 0,
                reason: format!("`{prefix}` must be an array of scalars"),
            })?;
            out.push((prefix.to_string(), parts.join(",")));
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), scalar(other).expect("scalar"))),
    }
    Ok(())
}

/// Resolves defaults, then file pairs, then flag pairs, then validates.
pub fn resolve(
    command: Command,
    file_pairs: &[(String, String)],
    flag_pairs: &[(String, String)],
) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::defaults(command);
    for (k, v) in file_pairs.iter().chain(flag_pairs) {
        cfg.set(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_key_is_settable() {
        let mut cfg = RunConfig::defaults(Command::Series);
        let sample = |k: &str| match k {
            "potential.a0" => "0.5,-0.5",
            "potential.field_scaling" => "fixed-field",
            "qtheta_mode" => "upper-block",
            "output.format" => "json",
            "output.path" => "out.json",
            "phys.c_list" | "nc.theta_list" | "nc.eta_list" | "series.orders" => "1,2,3",
            _ => "5",
        };
        for k in KEYS {
            cfg.set(k, sample(k)).unwrap_or_else(|e| panic!("{k}: {e}"));
        }
    }

    #[test]
    fn unknown_key_is_rejected() {
        let mut cfg = RunConfig::defaults(Command::Landau);
        assert_eq!(cfg.set("phys.speed", "3"), Err(ConfigError::UnknownKey("phys.speed".into())));
    }

    #[test]
    fn malformed_number_names_the_key() {
        let mut cfg = RunConfig::defaults(Command::Landau);
        let err = cfg.set("phys.c", "fast").unwrap_err();
        assert!(err.to_string().contains("phys.c"), "{err}");
    }

    #[test]
    fn kv_comments_and_json_nesting() {
        let kv = parse_kv_config("# comment\nphys.c = 20 # trailing\n\nnc.theta_list=0,0.1\n", "t").unwrap();
        assert_eq!(kv, vec![("phys.c".into(), "20".into()), ("nc.theta_list".into(), "0,0.1".into())]);
        let js = parse_json_config(r#"{"phys": {"c": 20, "c_list": [1, 2.5]}, "levels": 3}"#, "t").unwrap();
        assert!(js.contains(&("phys.c".into(), "20".into())));
        assert!(js.contains(&("phys.c_list".into(), "1,2.5".into())));
        assert!(js.contains(&("levels".into(), "3".into())));
    }

    #[test]
    fn landau_requires_field() {
        let err = resolve(Command::Landau, &[], &[("potential.B".into(), "0".into())]).unwrap_err();
        assert!(err.to_string().contains("B"));
    }
}

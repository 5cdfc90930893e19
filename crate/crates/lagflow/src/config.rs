//! `key = value` run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use lagflow_core::scalar_flow::Method;
use lagflow_core::Scheme;
use serde::Serialize;
use thiserror::Error;

use crate::presets;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice (first on line {first})")]
    Duplicate {
        line: usize,
        key: String,
        first: usize,
    },
    #[error("line {line}: invalid value `{value}` for `{key}`: {reason}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Scalar,
    Curve,
    Check,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "scalar" => Ok(Self::Scalar),
            "curve" => Ok(Self::Curve),
            "check" => Ok(Self::Check),
            _ => Err("expected scalar, curve or check".into()),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Scalar => "scalar",
            Self::Curve => "curve",
            Self::Check => "check",
        })
    }
}

/// Initial-data preset with its `name=value` parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InitSpec {
    pub name: String,
    pub params: BTreeMap<String, f64>,
}

impl InitSpec {
    pub fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }
}

impl fmt::Display for InitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub dim: usize,
    pub grid_m: usize,
    pub curve_m: usize,
    pub t_end: f64,
    pub method: Method,
    pub scheme: Scheme,
    pub cfl_sigma: f64,
    pub splitting_c: f64,
    pub max_dt: f64,
    pub blowup_threshold: f64,
    pub blowup_kappa: Option<f64>,
    pub resample_every: usize,
    pub init: Option<InitSpec>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub diag_every: usize,
    pub snapshot_every: usize,
    pub suite: Option<String>,
}

const KEYS: &[&str] = &[
    "mode",
    "dim",
    "grid_m",
    "curve_m",
    "t_end",
    "method",
    "scheme",
    "cfl_sigma",
    "splitting_c",
    "max_dt",
    "blowup_threshold",
    "blowup_kappa",
    "resample_every",
    "init",
    "seed",
    "output_dir",
    "diag_every",
    "snapshot_every",
    "suite",
];

struct Entry {
    line: usize,
    value: String,
}

fn typed<T: FromStr>(key: &str, e: &Entry) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    e.value.parse::<T>().map_err(|err| ConfigError::BadValue {
        line: e.line,
        key: key.to_string(),
        value: e.value.clone(),
        reason: err.to_string(),
    })
}

fn bad(key: &str, e: &Entry, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        line: e.line,
        key: key.to_string(),
        value: e.value.clone(),
        reason: reason.into(),
    }
}

/// Parse an init line such as `perturbed_circle amp=0.05 wave=3`.
pub fn parse_init(text: &str) -> Result<InitSpec, String> {
    let mut parts = text.split_whitespace();
    let name = parts.next().ok_or("empty preset")?.to_string();
    let preset = presets::find(&name).ok_or_else(|| format!("unknown preset `{name}`"))?;
    let mut params = BTreeMap::new();
    for p in parts {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| format!("parameter `{p}` is not `name=value`"))?;
        if !preset.params.iter().any(|(pk, _)| *pk == k) {
            return Err(format!("preset `{name}` has no parameter `{k}`"));
        }
        let v: f64 = v
            .parse()
            .map_err(|_| format!("parameter `{k}` needs a number, got `{v}`"))?;
        if params.insert(k.to_string(), v).is_some() {
            return Err(format!("parameter `{k}` given twice"));
        }
    }
    Ok(InitSpec { name, params })
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut entries: BTreeMap<&'static str, Entry> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            text: content.to_string(),
        })?;
        let key = key.trim();
        let value = value.trim();
        let known = KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            })?;
        if let Some(first) = entries.get(known) {
            return Err(ConfigError::Duplicate {
                line,
                key: key.to_string(),
                first: first.line,
            });
        }
        entries.insert(
            known,
            Entry {
                line,
                value: value.to_string(),
            },
        );
    }

    let mode: Mode = match entries.get("mode") {
        Some(e) => typed("mode", e)?,
        None => return Err(ConfigError::Missing("mode")),
    };
    let get = |key: &str| entries.get(key);
    let usize_or = |key: &str, default: usize| -> Result<usize, ConfigError> {
        get(key).map_or(Ok(default), |e| typed(key, e))
    };
    let f64_or = |key: &str, default: f64| -> Result<f64, ConfigError> {
        get(key).map_or(Ok(default), |e| typed(key, e))
    };

    let dim = usize_or("dim", 1)?;
    if let Some(e) = get("dim") {
        if !(1..=3).contains(&dim) {
            return Err(bad("dim", e, "must be 1, 2 or 3"));
        }
    }
    let grid_m = usize_or("grid_m", 64)?;
    if let Some(e) = get("grid_m") {
        if grid_m < 8 {
            return Err(bad("grid_m", e, "must be at least 8"));
        }
    }
    let curve_m = usize_or("curve_m", 256)?;
    if let Some(e) = get("curve_m") {
        if curve_m < 16 {
            return Err(bad("curve_m", e, "must be at least 16"));
        }
    }
    let t_end = match get("t_end") {
        Some(e) => {
            let t: f64 = typed("t_end", e)?;
            if !(t > 0.0) || !t.is_finite() {
                return Err(bad("t_end", e, "must be positive"));
            }
            t
        }
        None if mode == Mode::Check => 0.0,
        None => return Err(ConfigError::Missing("t_end")),
    };
    let default_method = match mode {
        Mode::Curve => Method::ImexSpectral,
        _ => Method::Rk4Explicit,
    };
    let method = get("method").map_or(Ok(default_method), |e| typed("method", e))?;
    let scheme = match get("scheme") {
        Some(e) => Scheme::parse(&e.value)
            .ok_or_else(|| bad("scheme", e, "expected central2, central4 or spectral"))?,
        None => Scheme::Central2,
    };
    let positive = |key: &str, v: f64| -> Result<f64, ConfigError> {
        match get(key) {
            Some(e) if !(v > 0.0) || !v.is_finite() => Err(bad(key, e, "must be positive")),
            _ => Ok(v),
        }
    };
    let cfl_sigma = f64_or("cfl_sigma", 0.1)?;
    if let Some(e) = get("cfl_sigma") {
        if !(cfl_sigma > 0.0 && cfl_sigma <= 1.0) {
            return Err(bad("cfl_sigma", e, "must lie in (0, 1]"));
        }
    }
    let splitting_c = f64_or("splitting_c", 1.0)?;
    if let Some(e) = get("splitting_c") {
        if !(splitting_c >= 1.0) || !splitting_c.is_finite() {
            return Err(bad("splitting_c", e, "must be at least 1"));
        }
    }
    let max_dt = positive("max_dt", f64_or("max_dt", 1e-4)?)?;
    let blowup_threshold = positive("blowup_threshold", f64_or("blowup_threshold", 1e3)?)?;
    let blowup_kappa = match get("blowup_kappa") {
        Some(e) => Some(positive("blowup_kappa", typed("blowup_kappa", e)?)?),
        None => None,
    };
    let resample_every = usize_or("resample_every", 5)?;
    let diag_every = usize_or("diag_every", 10)?;
    for key in ["resample_every", "diag_every"] {
        if let Some(e) = get(key) {
            if e.value.parse::<usize>().ok() == Some(0) {
                return Err(bad(key, e, "must be at least 1"));
            }
        }
    }
    let snapshot_every = usize_or("snapshot_every", 0)?;
    let seed = get("seed").map_or(Ok(0), |e| typed("seed", e))?;
    let output_dir =
        get("output_dir").map_or_else(|| PathBuf::from("lagflow_out"), |e| PathBuf::from(&e.value));

    let init = match get("init") {
        Some(e) => {
            let spec = parse_init(&e.value).map_err(|r| bad("init", e, r))?;
            let preset = presets::find(&spec.name).expect("checked by parse_init");
            let wanted = match mode {
                Mode::Scalar => presets::Kind::Scalar,
                Mode::Curve => presets::Kind::Curve,
                Mode::Check => return Err(bad("init", e, "check mode takes no initial data")),
            };
            if preset.kind != wanted {
                return Err(bad(
                    "init",
                    e,
                    format!("preset is not valid in {mode} mode"),
                ));
            }
            Some(spec)
        }
        None if mode == Mode::Check => None,
        None => return Err(ConfigError::Missing("init")),
    };
    let suite = match get("suite") {
        Some(e) => {
            if mode != Mode::Check {
                return Err(bad("suite", e, "only valid with mode = check"));
            }
            if !crate::suites::SUITES.contains(&e.value.as_str()) {
                return Err(bad("suite", e, "unknown suite"));
            }
            Some(e.value.clone())
        }
        None if mode == Mode::Check => return Err(ConfigError::Missing("suite")),
        None => None,
    };

    Ok(RunConfig {
        mode,
        dim,
        grid_m,
        curve_m,
        t_end,
        method,
        scheme,
        cfl_sigma,
        splitting_c,
        max_dt,
        blowup_threshold,
        blowup_kappa,
        resample_every,
        init,
        seed,
        output_dir,
        diag_every,
        snapshot_every,
        suite,
    })
}

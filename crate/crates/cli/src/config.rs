use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use rabi_core::model::{params_from_json, to_dimensionless};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::grid::{Axis, PartialPoint};

/// Bad or missing input; reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Layer {
    Exact,
    Meanfield,
    Cumulant,
    Effective,
    Scaling,
}

impl Layer {
    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Exact => "exact",
            Layer::Meanfield => "meanfield",
            Layer::Cumulant => "cumulant",
            Layer::Effective => "effective",
            Layer::Scaling => "scaling",
        }
    }
}

impl FromStr for Layer {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "exact" => Layer::Exact,
            "meanfield" => Layer::Meanfield,
            "cumulant" => Layer::Cumulant,
            "effective" => Layer::Effective,
            "scaling" => Layer::Scaling,
            other => bail!("unknown layer '{other}'"),
        })
    }
}

/// Sorted, de-duplicated layer selection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layers(Vec<Layer>);

impl Layers {
    pub fn parse_list<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        let mut v = items
            .iter()
            .flat_map(|s| s.as_ref().split(',').map(str::to_string).collect::<Vec<_>>())
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.parse())
            .collect::<Result<Vec<Layer>>>()?;
        v.sort();
        v.dedup();
        if v.is_empty() {
            bail!("no layers selected");
        }
        Ok(Self(v))
    }

    pub fn has(&self, l: Layer) -> bool {
        self.0.contains(&l)
    }

    pub fn iter(&self) -> impl Iterator<Item = Layer> + '_ {
        self.0.iter().copied()
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.0.iter().map(|l| l.as_str()).collect()
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    eta: Option<f64>,
    lam_m: Option<f64>,
    lam_p: Option<f64>,
    kappa_ratio: Option<f64>,
    r: Option<f64>,
    cutoff: Option<usize>,
    tol: Option<f64>,
    layers: Option<Value>,
    workers: Option<usize>,
    max_mem: Option<u64>,
    out: Option<PathBuf>,
    axis1: Option<String>,
    axis2: Option<String>,
    etas: Option<Vec<f64>>,
    rs: Option<Vec<f64>>,
    dlams: Option<Vec<f64>>,
    t_max: Option<f64>,
    samples: Option<usize>,
    init: Option<String>,
    rtol: Option<f64>,
}

/// Keys that steer execution but never change numeric output; excluded from the hash.
const EXECUTION_KEYS: [&str; 3] = ["workers", "max_mem", "out"];
const PHYSICAL_KEYS: [&str; 5] = ["omega_c", "Omega", "lambda_minus", "lambda_plus", "kappa"];

#[derive(Debug, Clone)]
pub struct Settings {
    /// Resolved result-affecting configuration (hashed into the manifest).
    pub config: Value,
    pub point: PartialPoint,
    pub cutoff: Option<usize>,
    pub tol: Option<f64>,
    pub layers: Option<Layers>,
    pub workers: usize,
    pub max_mem_bytes: u64,
    pub out: PathBuf,
    pub axis1: Option<Axis>,
    pub axis2: Option<Axis>,
    pub etas: Option<Vec<f64>>,
    pub rs: Option<Vec<f64>>,
    pub dlams: Option<Vec<f64>>,
    pub t_max: Option<f64>,
    pub samples: Option<usize>,
    pub init_up: Option<bool>,
    pub rtol: Option<f64>,
}

pub const DEFAULT_MAX_MEM_MB: u64 = 4096;

fn load(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    match serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))? {
        Value::Object(m) => Ok(m),
        _ => Err(usage("config must be a JSON object")),
    }
}

/// Merges the config file (if any) with command-line overrides (`Null` = not given).
pub fn resolve(command: &str, config: Option<&Path>, overrides: Vec<(&str, Value)>) -> Result<Settings> {
    let mut map = match config {
        Some(p) => load(p)?,
        None => Map::new(),
    };
    if PHYSICAL_KEYS.iter().any(|k| map.contains_key(*k)) {
        let p = params_from_json(&Value::Object(map.clone())).map_err(|e| usage(e.to_string()))?;
        let d = to_dimensionless(&p).map_err(|e| usage(e.to_string()))?;
        for k in PHYSICAL_KEYS {
            map.remove(k);
        }
        map.insert("eta".into(), (d.omega_sign * d.eta).into());
        map.insert("lam_m".into(), d.lam_m.into());
        map.insert("lam_p".into(), d.lam_p.into());
        map.insert("kappa_ratio".into(), d.kappa_ratio.into());
    }
    for (k, v) in overrides {
        if !v.is_null() {
            map.insert(k.to_string(), v);
        }
    }
    let raw: Raw = serde_json::from_value(Value::Object(map.clone())).map_err(|e| usage(format!("config: {e}")))?;

    let layers = match &raw.layers {
        None => None,
        Some(Value::String(s)) => Some(Layers::parse_list(&[s])),
        Some(Value::Array(a)) => Some(Layers::parse_list(
            &a.iter().map(|v| v.as_str().unwrap_or("?").to_string()).collect::<Vec<_>>(),
        )),
        Some(_) => Some(Err(anyhow!("layers must be a string or list"))),
    }
    .transpose()
    .map_err(|e| usage(e.to_string()))?;
    if let Some(l) = &layers {
        map.insert("layers".into(), l.names().into());
    }
    let axis = |s: &Option<String>| -> Result<Option<Axis>> {
        s.as_deref().map(|a| a.parse::<Axis>().map_err(|e| usage(e.to_string()))).transpose()
    };
    let init_up = match raw.init.as_deref() {
        None => None,
        Some("up") => Some(true),
        Some("down") => Some(false),
        Some(other) => return Err(usage(format!("--init must be up or down, got '{other}'"))),
    };
    let mut hashed = map.clone();
    for k in EXECUTION_KEYS {
        hashed.remove(k);
    }
    hashed.insert("command".into(), command.into());

    Ok(Settings {
        config: Value::Object(hashed),
        point: PartialPoint {
            eta: raw.eta,
            lam_m: raw.lam_m,
            lam_p: raw.lam_p,
            kappa_ratio: raw.kappa_ratio,
            r: raw.r,
        },
        cutoff: raw.cutoff,
        tol: raw.tol,
        layers,
        workers: raw
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        max_mem_bytes: raw.max_mem.unwrap_or(DEFAULT_MAX_MEM_MB) * 1024 * 1024,
        out: raw.out.unwrap_or_else(|| PathBuf::from("rabi-out")),
        axis1: axis(&raw.axis1)?,
        axis2: axis(&raw.axis2)?,
        etas: raw.etas,
        rs: raw.rs,
        dlams: raw.dlams,
        t_max: raw.t_max,
        samples: raw.samples,
        init_up,
        rtol: raw.rtol,
    })
}

/// Converts an optional flag into an override entry.
pub fn ov<T: serde::Serialize>(key: &'static str, v: &Option<T>) -> (&'static str, Value) {
    (key, v.as_ref().map_or(Value::Null, |x| serde_json::to_value(x).expect("serializable flag")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flags_override_config_and_exec_keys_are_not_hashed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"eta": 10, "lam_m": 1, "lam_p": 1, "kappa_ratio": 0.5, "workers": 3}"#).unwrap();
        let s = resolve("steady", Some(&path), vec![("eta", json!(20.0)), ("tol", Value::Null)]).unwrap();
        assert_eq!(s.point.eta, Some(20.0));
        assert_eq!(s.workers, 3);
        assert!(s.config.get("workers").is_none());
        assert_eq!(s.config["command"], "steady");
    }

    #[test]
    fn physical_keys_are_rescaled() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"omega_c": 2, "Omega": 200, "lambda_minus": 5, "lambda_plus": 0, "kappa": 1}"#).unwrap();
        let s = resolve("steady", Some(&path), vec![]).unwrap();
        let p = s.point.complete().unwrap();
        assert_eq!(p.eta, 100.0);
        assert!((p.lam_m - 0.5).abs() < 1e-15);
        assert_eq!(p.kappa_ratio, 0.5);
    }

    #[test]
    fn rejects_unknown_keys_and_layers() {
        assert!(resolve("x", None, vec![("layers", json!("exact,bogus"))]).unwrap_err().is::<UsageError>());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"etaa": 1}"#).unwrap();
        assert!(resolve("x", Some(&path), vec![]).unwrap_err().is::<UsageError>());
        let l = Layers::parse_list(&["effective,exact", "exact"]).unwrap();
        assert_eq!(l.names(), vec!["exact", "effective"]);
    }
}

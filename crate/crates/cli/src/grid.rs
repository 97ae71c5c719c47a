use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Result};
use rabi_core::ModelParams;
use serde::{Deserialize, Serialize};

/// One parameter point in rescaled units (`omega_c = 1`, `eta` carries the sign of `Omega`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub eta: f64,
    pub lam_m: f64,
    pub lam_p: f64,
    pub kappa_ratio: f64,
}

impl Point {
    pub fn model(&self) -> ModelParams {
        ModelParams::from_dimensionless(self.eta, self.lam_m, self.lam_p, self.kappa_ratio)
    }
}

/// Partially specified point; sweep axes fill the gaps.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PartialPoint {
    pub eta: Option<f64>,
    pub lam_m: Option<f64>,
    pub lam_p: Option<f64>,
    pub kappa_ratio: Option<f64>,
    /// `lam_p / lam_m`; applied after `lam_m` is known.
    pub r: Option<f64>,
}

impl PartialPoint {
    pub fn complete(&self) -> Result<Point> {
        let need = |v: Option<f64>, name: &str| v.ok_or_else(|| anyhow!("missing parameter '{name}'"));
        let lam_m = need(self.lam_m, "lam_m")?;
        let lam_p = match (self.lam_p, self.r) {
            (Some(_), Some(_)) => bail!("both 'lam_p' and 'r' given"),
            (Some(p), None) => p,
            (None, Some(r)) => r * lam_m,
            (None, None) => bail!("missing parameter 'lam_p'"),
        };
        Ok(Point {
            eta: need(self.eta, "eta")?,
            lam_m,
            lam_p,
            kappa_ratio: need(self.kappa_ratio, "kappa_ratio")?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    Eta,
    LamM,
    LamP,
    KappaRatio,
    R,
}

impl AxisName {
    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::Eta => "eta",
            AxisName::LamM => "lam_m",
            AxisName::LamP => "lam_p",
            AxisName::KappaRatio => "kappa_ratio",
            AxisName::R => "r",
        }
    }

    fn set(self, p: &mut PartialPoint, v: f64) {
        match self {
            AxisName::Eta => p.eta = Some(v),
            AxisName::LamM => p.lam_m = Some(v),
            AxisName::LamP => {
                p.lam_p = Some(v);
                p.r = None;
            }
            AxisName::KappaRatio => p.kappa_ratio = Some(v),
            AxisName::R => {
                p.r = Some(v);
                p.lam_p = None;
            }
        }
    }
}

impl FromStr for AxisName {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "eta" => AxisName::Eta,
            "lam_m" | "lam-m" => AxisName::LamM,
            "lam_p" | "lam-p" => AxisName::LamP,
            "kappa_ratio" | "kappa-ratio" => AxisName::KappaRatio,
            "r" => AxisName::R,
            _ => bail!("unknown axis '{s}' (expected eta, lam_m, lam_p, kappa_ratio or r)"),
        })
    }
}

/// `name:min:max:steps`. `steps >= 2` with `min < max`, or a single point with `min == max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(name: AxisName, min: f64, max: f64, steps: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            bail!("axis bounds must be finite");
        }
        match steps {
            0 => bail!("axis needs at least one step"),
            1 if min != max => bail!("a single-step axis needs min == max"),
            1 => {}
            _ if !(min < max) => bail!("axis needs min < max, got {min} >= {max}"),
            _ => {}
        }
        Ok(Self { name, min, max, steps })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.max } else { self.min + (self.max - self.min) * i as f64 / last })
            .collect()
    }
}

impl FromStr for Axis {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            bail!("axis '{s}' must look like name:min:max:steps");
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| anyhow!("axis '{s}': {e}"));
        let steps = parts[3].trim().parse::<usize>().map_err(|e| anyhow!("axis '{s}': {e}"))?;
        Axis::new(parts[0].trim().parse()?, num(parts[1])?, num(parts[2])?, steps)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.name.as_str(), self.min, self.max, self.steps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub coords: Vec<f64>,
    pub point: std::result::Result<Point, String>,
}

/// Axis1-major grid; points missing a parameter carry the error instead of aborting.
pub fn build_grid(base: &PartialPoint, axis1: &Axis, axis2: Option<&Axis>) -> Vec<GridPoint> {
    let inner = axis2.map(Axis::values).unwrap_or_else(|| vec![f64::NAN]);
    let mut out = Vec::new();
    for a in axis1.values() {
        for &b in &inner {
            let mut p = *base;
            axis1.name.set(&mut p, a);
            let mut coords = vec![a];
            if let Some(ax2) = axis2 {
                ax2.name.set(&mut p, b);
                coords.push(b);
            }
            out.push(GridPoint {
                index: out.len(),
                coords,
                point: p.complete().map_err(|e| e.to_string()),
            });
        }
    }
    out
}

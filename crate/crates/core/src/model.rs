//! Model parameters of the anisotropic Rabi model with cavity loss.
//!
//! Physical parameters use hbar = 1. The dimensionless set measures
//! frequencies in units of `omega_c` and couplings in units of the closed,
//! isotropic critical coupling `lambda_c = sqrt(omega_c |Omega|) / 2`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Physical couplings of
/// `H = wc a^dag a + (Omega/2) sz - lm (a s+ + a^dag s-) - lp (a s- + a^dag s+)`
/// with photon loss `kappa D[a]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega_c: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    pub kappa: f64,
}

impl ModelParams {
    pub fn new(omega_c: f64, omega: f64, lambda_minus: f64, lambda_plus: f64, kappa: f64) -> Self {
        Self {
            omega_c,
            omega,
            lambda_minus,
            lambda_plus,
            kappa,
        }
    }

    /// Builds physical parameters (with `omega_c = 1`) from the rescaled set.
    pub fn from_dimensionless(eta: f64, lam_m: f64, lam_p: f64, kappa_ratio: f64) -> Self {
        let lambda_c = eta.abs().sqrt() / 2.0;
        Self {
            omega_c: 1.0,
            omega: eta,
            lambda_minus: lam_m * lambda_c,
            lambda_plus: lam_p * lambda_c,
            kappa: kappa_ratio,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.omega_c,
            self.omega,
            self.lambda_minus,
            self.lambda_plus,
            self.kappa,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if self.omega_c <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "omega_c must be > 0, got {}",
                self.omega_c
            )));
        }
        if self.kappa < 0.0 {
            return Err(Error::InvalidParams(format!(
                "kappa must be >= 0, got {}",
                self.kappa
            )));
        }
        Ok(())
    }

    /// `sqrt(omega_c |Omega|) / 2`.
    pub fn lambda_c(&self) -> f64 {
        (self.omega_c * self.omega.abs()).sqrt() / 2.0
    }

    pub fn to_dimensionless(&self) -> Result<DimlessParams> {
        to_dimensionless(self)
    }
}

/// Rescaled parameters. `lam_x`/`lam_y` are the quadrature couplings
/// `(lam_p +- lam_m) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimlessParams {
    /// `|Omega| / omega_c`.
    pub eta: f64,
    /// Sign of `Omega`; enters the full mean-field spin equation.
    pub omega_sign: f64,
    pub lam_m: f64,
    pub lam_p: f64,
    /// `lam_p / lam_m`, `None` when `lam_m = 0`.
    pub r: Option<f64>,
    pub kappa_ratio: f64,
    pub lam_x: f64,
    pub lam_y: f64,
}

impl DimlessParams {
    pub fn new(eta: f64, lam_m: f64, lam_p: f64, kappa_ratio: f64) -> Self {
        Self {
            eta: eta.abs(),
            omega_sign: if eta < 0.0 { -1.0 } else { 1.0 },
            lam_m,
            lam_p,
            r: if lam_m == 0.0 { None } else { Some(lam_p / lam_m) },
            kappa_ratio,
            lam_x: 0.5 * (lam_p + lam_m),
            lam_y: 0.5 * (lam_p - lam_m),
        }
    }

    /// Point on the line `lam_p = r lam_m`.
    pub fn along_ratio(eta: f64, lam_m: f64, r: f64, kappa_ratio: f64) -> Self {
        Self::new(eta, lam_m, r * lam_m, kappa_ratio)
    }

    /// Physical parameters with `omega_c = 1`.
    pub fn to_model(&self) -> ModelParams {
        ModelParams::from_dimensionless(self.omega_sign * self.eta, self.lam_m, self.lam_p, self.kappa_ratio)
    }
}

pub fn to_dimensionless(p: &ModelParams) -> Result<DimlessParams> {
    p.validate()?;
    if p.omega == 0.0 {
        return Err(Error::SingularRescaling);
    }
    let lc = p.lambda_c();
    let mut d = DimlessParams::new(
        p.omega / p.omega_c,
        p.lambda_minus / lc,
        p.lambda_plus / lc,
        p.kappa / p.omega_c,
    );
    d.eta = p.omega.abs() / p.omega_c;
    Ok(d)
}

/// Unitary symmetry maps of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymmetryMap {
    /// `exp[i pi/4 (sz - 2 a^dag a)]`: `lam_pm -> +-lam_pm`, i.e. flips `lambda_minus`.
    U1,
    /// `exp[i pi/2 sz]`: flips both couplings.
    U2,
    /// `exp[i pi/2 sx]`: `Omega -> -Omega`, `lam_pm -> lam_mp`, flips the sign of `sz`.
    U3,
}

impl SymmetryMap {
    /// Each map is an involution on the parameters.
    pub fn apply(self, p: &ModelParams) -> ModelParams {
        let mut q = *p;
        match self {
            SymmetryMap::U1 => q.lambda_minus = -p.lambda_minus,
            SymmetryMap::U2 => {
                q.lambda_minus = -p.lambda_minus;
                q.lambda_plus = -p.lambda_plus;
            }
            SymmetryMap::U3 => {
                q.omega = -p.omega;
                q.lambda_minus = p.lambda_plus;
                q.lambda_plus = p.lambda_minus;
            }
        }
        q
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignTransform {
    pub applied_maps: Vec<SymmetryMap>,
    pub sigma_z_sign_flip: bool,
}

impl SignTransform {
    /// Applies the recorded maps, in order, to `p`.
    pub fn forward(&self, p: &ModelParams) -> ModelParams {
        self.applied_maps.iter().fold(*p, |acc, m| m.apply(&acc))
    }

    /// Undoes the recorded maps, recovering the original parameters from
    /// the canonical ones.
    pub fn restore(&self, canonical: &ModelParams) -> ModelParams {
        self.applied_maps
            .iter()
            .rev()
            .fold(*canonical, |acc, m| m.apply(&acc))
    }
}

/// Maps parameters into the canonical region `Omega > 0`, `lambda_pm >= 0`.
pub fn canonicalize(p: &ModelParams) -> (ModelParams, SignTransform) {
    let mut t = SignTransform::default();
    let mut q = *p;
    if q.omega < 0.0 {
        q = SymmetryMap::U3.apply(&q);
        t.applied_maps.push(SymmetryMap::U3);
        t.sigma_z_sign_flip = true;
    }
    match (q.lambda_minus < 0.0, q.lambda_plus < 0.0) {
        (true, true) => {
            q = SymmetryMap::U2.apply(&q);
            t.applied_maps.push(SymmetryMap::U2);
        }
        (true, false) => {
            q = SymmetryMap::U1.apply(&q);
            t.applied_maps.push(SymmetryMap::U1);
        }
        (false, true) => {
            q = SymmetryMap::U1.apply(&q);
            q = SymmetryMap::U2.apply(&q);
            t.applied_maps.push(SymmetryMap::U1);
            t.applied_maps.push(SymmetryMap::U2);
        }
        (false, false) => {}
    }
    (q, t)
}

const PHYSICAL_KEYS: [&str; 5] = ["omega_c", "Omega", "lambda_minus", "lambda_plus", "kappa"];
const DIMLESS_KEYS: [&str; 4] = ["eta", "lam_m", "lam_p", "kappa_ratio"];

/// Parses a parameter object holding exactly one of the physical key set
/// `{omega_c, Omega, lambda_minus, lambda_plus, kappa}` or the dimensionless
/// set `{eta, lam_m, lam_p, kappa_ratio}` (with `omega_c = 1`). Unrelated
/// keys are ignored so the object can be embedded in a larger config.
pub fn params_from_json(v: &Value) -> Result<ModelParams> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Config("parameters must be a JSON object".into()))?;
    let has_phys = PHYSICAL_KEYS.iter().any(|k| obj.contains_key(*k));
    let has_dimless = DIMLESS_KEYS.iter().any(|k| obj.contains_key(*k));
    let num = |k: &str| -> Result<f64> {
        obj.get(k)
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::Config(format!("missing or non-numeric key '{k}'")))
    };
    let p = match (has_phys, has_dimless) {
        (true, true) => {
            return Err(Error::Config(
                "both physical and dimensionless parameter keys present".into(),
            ))
        }
        (false, false) => return Err(Error::Config("no parameter keys present".into())),
        (true, false) => ModelParams::new(
            num("omega_c")?,
            num("Omega")?,
            num("lambda_minus")?,
            num("lambda_plus")?,
            num("kappa")?,
        ),
        (false, true) => ModelParams::from_dimensionless(
            num("eta")?,
            num("lam_m")?,
            num("lam_p")?,
            num("kappa_ratio")?,
        ),
    };
    p.validate()?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use serde_json::json;

    #[test]
    fn rescaling_examples() {
        let d = to_dimensionless(&ModelParams::new(1.0, 100.0, 3.09, 3.09, 0.5)).unwrap();
        assert_relative_eq!(d.eta, 100.0);
        assert_relative_eq!(d.lam_m, 0.618, epsilon = 1e-12);
        assert_relative_eq!(d.lam_p, 0.618, epsilon = 1e-12);
        assert_relative_eq!(d.kappa_ratio, 0.5);

        let d = to_dimensionless(&ModelParams::new(1.0, 1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!((d.eta, d.lam_m, d.lam_p), (1.0, 0.0, 0.0));
        assert!(d.r.is_none());

        // lambda_c = sqrt(2 * 800) / 2 = 20
        let d = to_dimensionless(&ModelParams::new(2.0, 800.0, 20.0, 60.0, 1.0)).unwrap();
        assert_relative_eq!(d.eta, 400.0);
        assert_relative_eq!(d.lam_m, 1.0, epsilon = 1e-14);
        assert_relative_eq!(d.lam_p, 3.0, epsilon = 1e-14);
        assert_relative_eq!(d.kappa_ratio, 0.5);
        assert_relative_eq!(d.r.unwrap(), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn zero_splitting_is_rejected() {
        let err = to_dimensionless(&ModelParams::new(1.0, 0.0, 1.0, 1.0, 0.5)).unwrap_err();
        assert!(matches!(err, Error::SingularRescaling));
        assert!(to_dimensionless(&ModelParams::new(0.0, 1.0, 1.0, 1.0, 0.5)).is_err());
        assert!(to_dimensionless(&ModelParams::new(1.0, 1.0, 1.0, 1.0, -0.1)).is_err());
    }

    #[test]
    fn canonicalize_examples() {
        let (q, t) = canonicalize(&ModelParams::new(1.0, 5.0, -2.0, -3.0, 0.5));
        assert_eq!((q.omega, q.lambda_minus, q.lambda_plus), (5.0, 2.0, 3.0));
        assert_eq!(t.applied_maps, vec![SymmetryMap::U2]);
        assert!(!t.sigma_z_sign_flip);

        let (q, t) = canonicalize(&ModelParams::new(1.0, -5.0, 2.0, 3.0, 0.5));
        assert_eq!((q.omega, q.lambda_minus, q.lambda_plus), (5.0, 3.0, 2.0));
        assert_eq!(t.applied_maps, vec![SymmetryMap::U3]);
        assert!(t.sigma_z_sign_flip);

        // U1 flips lambda_minus only, so a lone negative lambda_plus needs U1 then U2.
        let (q, t) = canonicalize(&ModelParams::new(1.0, 5.0, 2.0, -3.0, 0.5));
        assert_eq!((q.omega, q.lambda_minus, q.lambda_plus), (5.0, 2.0, 3.0));
        assert_eq!(t.applied_maps, vec![SymmetryMap::U1, SymmetryMap::U2]);

        let (q, t) = canonicalize(&ModelParams::new(1.0, 5.0, -2.0, 3.0, 0.5));
        assert_eq!((q.lambda_minus, q.lambda_plus), (2.0, 3.0));
        assert_eq!(t.applied_maps, vec![SymmetryMap::U1]);
    }

    #[test]
    fn json_parsing() {
        let p = params_from_json(&json!({"eta": 100.0, "lam_m": 1.0, "lam_p": 3.0, "kappa_ratio": 0.5}))
            .unwrap();
        assert_eq!(p.omega_c, 1.0);
        assert_relative_eq!(p.lambda_minus, 5.0);
        assert_relative_eq!(p.lambda_plus, 15.0);

        let p = params_from_json(&json!({
            "omega_c": 2.0, "Omega": 800.0, "lambda_minus": 20.0, "lambda_plus": 60.0, "kappa": 1.0
        }))
        .unwrap();
        assert_eq!(p.omega, 800.0);

        assert!(params_from_json(&json!({"eta": 1.0, "lam_m": 1.0, "lam_p": 1.0, "kappa_ratio": 0.5, "kappa": 1.0})).is_err());
        assert!(params_from_json(&json!({"eta": 1.0, "lam_m": 1.0})).is_err());
        assert!(params_from_json(&json!({"layers": ["exact"]})).is_err());
    }

    fn any_params() -> impl Strategy<Value = ModelParams> {
        (0.1f64..5.0, -50.0f64..50.0, -5.0f64..5.0, -5.0f64..5.0, 0.0f64..2.0)
            .prop_map(|(wc, om, lm, lp, k)| ModelParams::new(wc, om, lm, lp, k))
    }

    proptest! {
        #[test]
        fn canonical_region_and_round_trip(p in any_params()) {
            let (q, t) = canonicalize(&p);
            prop_assert!(q.omega >= 0.0 && q.lambda_minus >= 0.0 && q.lambda_plus >= 0.0);
            prop_assert_eq!(t.forward(&p), q);
            prop_assert_eq!(t.restore(&q), p);
            prop_assert_eq!(t.sigma_z_sign_flip, t.applied_maps.contains(&SymmetryMap::U3));
        }

        #[test]
        fn quadrature_couplings_recombine(lm in -5.0f64..5.0, lp in -5.0f64..5.0) {
            let d = DimlessParams::new(100.0, lm, lp, 0.5);
            prop_assert!((d.lam_x - d.lam_y - lm).abs() <= 4.0 * f64::EPSILON * (lm.abs() + lp.abs()));
            prop_assert!((d.lam_x + d.lam_y - lp).abs() <= 4.0 * f64::EPSILON * (lm.abs() + lp.abs()));
        }
    }
}

//! Effective equilibrium theory of the second-order transition: quartic
//! potential coefficients, noise temperature, the Q-function, critical
//! fluctuations and scaling-collapse coefficients.
//!
//! Frequencies are in units of `omega_c` (temperature reference `omega_0 = omega_c`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meanfield::{boundary_lambda_c, boundary_r_pm};
use crate::model::DimlessParams;

/// `Gamma(3/4) / Gamma(1/4)`.
pub const Q_AT_ZERO: f64 = 0.337_989_120_033_642_36;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticCoeffs {
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub alpha_sq: f64,
    pub beta_cu: f64,
    pub temperature: f64,
    /// Slope `-d(alpha^2)/d(lam_m)` on the second-order line of this ratio;
    /// `None` when the ratio never crosses it.
    pub lambda: Option<f64>,
}

/// `Lambda = lc [1 + r^2 - (1 - r^2)^2 lc^2 / 4]` at `lc = lam_c_minus(r)`.
pub fn lambda_slope(r: f64, kappa_ratio: f64) -> Result<f64> {
    let (lc, _) = boundary_lambda_c(r, kappa_ratio)?;
    let w = 1.0 - r * r;
    Ok(lc * (1.0 + r * r - 0.25 * w * w * lc * lc))
}

pub fn quartic_coeffs(d: &DimlessParams) -> Result<QuarticCoeffs> {
    let k = d.kappa_ratio;
    let alpha_x = 1.0 - d.lam_x * d.lam_x;
    let alpha_y = 1.0 - d.lam_y * d.lam_y;
    if alpha_y == 0.0 {
        return Err(Error::SingularQuadratic);
    }
    let alpha_sq = alpha_x * alpha_y + k * k;
    let beta_cu = alpha_y * d.lam_x.powi(4) - (k * d.lam_y).powi(4) / alpha_y.powi(3);
    let temperature = 0.25 * (k * k + alpha_y * alpha_y);
    let lambda = d.r.and_then(|r| lambda_slope(r, k).ok());
    Ok(QuarticCoeffs {
        alpha_x,
        alpha_y,
        alpha_sq,
        beta_cu,
        temperature,
        lambda,
    })
}

/// `V(x) = alpha^2 x^2 / 2 + beta^3 x^4 / (4 eta)` in units of `omega_c`.
pub fn quartic_potential(c: &QuarticCoeffs, eta: f64, x: f64) -> f64 {
    0.5 * c.alpha_sq * x * x + 0.25 * c.beta_cu * x.powi(4) / eta
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let s = f(c - h * XGK[j]) + f(c + h * XGK[j]);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature on `[a, b]`: starts
/// from a uniform partition and bisects the panel with the largest error
/// estimate until the total error is below `rel_tol |I|` or the panel
/// budget is spent.
pub fn integrate_gk<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    const PANELS: usize = 64;
    const MAX_PANELS: usize = 4000;
    let w = (b - a) / PANELS as f64;
    let mut panels: Vec<(f64, f64, f64, f64)> = (0..PANELS)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * w, a + (i + 1) as f64 * w);
            let (v, e) = gk15(&f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();
    while panels.len() < MAX_PANELS {
        let total: f64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= rel_tol * total.abs() {
            break;
        }
        let worst = (0..panels.len())
            .max_by(|&i, &j| panels[i].3.total_cmp(&panels[j].3))
            .expect("non-empty partition");
        let (lo, hi, _, _) = panels[worst];
        let m = 0.5 * (lo + hi);
        let (lv, le) = gk15(&f, lo, m);
        let (rv, re) = gk15(&f, m, hi);
        panels[worst] = (lo, m, lv, le);
        panels.push((m, hi, rv, re));
    }
    panels.iter().map(|p| p.2).sum()
}

/// `Q(x) = int z^2 exp(-(x - z^2)^2) dz / int exp(-(x - z^2)^2) dz`.
pub fn q_function(x: f64) -> f64 {
    let mut z_max = (x.max(0.0) + 6.0).sqrt() + 6.0;
    if x < 0.0 {
        // the weight is below e^-50 of its peak once 2|x| z^2 or z^4 exceeds 50
        z_max = z_max.min((25.0 / -x).sqrt()).min(50f64.powf(0.25) + 0.5);
    }
    // constant shift keeps the weight representable for large negative x
    let shift = if x < 0.0 { x * x } else { 0.0 };
    let w = move |z: f64| (-(x - z * z).powi(2) + shift).exp();
    let num = integrate_gk(|z| z * z * w(z), 0.0, z_max, 1e-12);
    let den = integrate_gk(w, 0.0, z_max, 1e-12);
    num / den
}

/// Weight of NP_down, `lam_m^2 / (lam_m^2 + lam_p^2) = 1/(1 + r^2)`.
fn p_minus(d: &DimlessParams) -> Result<f64> {
    let total = d.lam_m * d.lam_m + d.lam_p * d.lam_p;
    if total == 0.0 {
        return Err(Error::UndefinedCouplings);
    }
    Ok(d.lam_m * d.lam_m / total)
}

/// Classical average of `x^2` in the quartic potential at the noise temperature.
pub fn x2_stationary(d: &DimlessParams, eta: f64) -> Result<f64> {
    let c = quartic_coeffs(d)?;
    if !(c.beta_cu > 0.0) {
        return Err(Error::NoConfiningQuartic { beta_cu: c.beta_cu });
    }
    let pm = p_minus(d)?;
    let t = c.temperature;
    let arg = -0.5 * c.alpha_sq * (eta / (c.beta_cu * t)).sqrt();
    Ok(2.0 * pm * (eta * t / c.beta_cu).sqrt() * q_function(arg))
}

/// Infinite-eta normal-side limit `P_minus T / alpha^2`.
pub fn x2_normal_limit(d: &DimlessParams) -> Result<f64> {
    let c = quartic_coeffs(d)?;
    Ok(p_minus(d)? * c.temperature / c.alpha_sq)
}

/// Quadratic-theory data at the second-order point of ratio `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub r: f64,
    pub lam_m: f64,
    pub lam_p: f64,
    pub beta_cu: f64,
    pub temperature: f64,
    pub lambda: f64,
    pub p_minus: f64,
}

pub fn critical_point(r: f64, kappa_ratio: f64) -> Result<CriticalPoint> {
    let b = boundary_r_pm(kappa_ratio);
    if r != 1.0 && !(r > b.r_minus && r < b.r_plus) {
        return Err(Error::OutsideRatioWindow {
            r,
            r_minus: b.r_minus,
            r_plus: b.r_plus,
        });
    }
    let (lc, _) = boundary_lambda_c(r, kappa_ratio)?;
    let d = DimlessParams::along_ratio(1.0, lc, r, kappa_ratio);
    let c = quartic_coeffs(&d)?;
    if !(c.beta_cu > 0.0) {
        return Err(Error::NoConfiningQuartic { beta_cu: c.beta_cu });
    }
    Ok(CriticalPoint {
        r,
        lam_m: lc,
        lam_p: r * lc,
        beta_cu: c.beta_cu,
        temperature: c.temperature,
        lambda: lambda_slope(r, kappa_ratio)?,
        p_minus: 1.0 / (1.0 + r * r),
    })
}

/// `<x^2>` at the second-order point, `(2 Q(0)/(1+r^2)) sqrt(T/beta^3) sqrt(eta)`.
pub fn critical_x2(r: f64, kappa_ratio: f64, eta: f64) -> Result<f64> {
    let cp = critical_point(r, kappa_ratio)?;
    Ok(2.0 * Q_AT_ZERO * cp.p_minus * (cp.temperature / cp.beta_cu).sqrt() * eta.sqrt())
}

/// Isotropic critical fluctuations `(Q(0)/2) sqrt(eta / (1 + kappa^2))`.
pub fn critical_x2_isotropic(kappa_ratio: f64, eta: f64) -> f64 {
    0.5 * Q_AT_ZERO * (eta / (1.0 + kappa_ratio * kappa_ratio)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub nu: f64,
    pub zeta: f64,
    pub critical: CriticalPoint,
}

pub fn scaling_coeffs(r: f64, kappa_ratio: f64) -> Result<ScalingCoeffs> {
    let cp = critical_point(r, kappa_ratio)?;
    let c1 = 0.5 * cp.lambda * (1.0 / (cp.beta_cu * cp.temperature)).sqrt();
    let c2 = cp.lambda / (4.0 * cp.p_minus * cp.temperature);
    Ok(ScalingCoeffs {
        c1,
        c2,
        nu: 1.0,
        zeta: 0.5,
        critical: cp,
    })
}

impl ScalingCoeffs {
    /// `F(x) = (c1/c2) sqrt(x) Q(c1 sqrt(x))` for `x >= 0`.
    pub fn scaling_function(&self, x: f64) -> f64 {
        let s = x.sqrt();
        self.c1 / self.c2 * s * q_function(self.c1 * s)
    }

    /// Signed collapse abscissa `u = c1 sqrt(eta) dlam` (so `u^2 = c1^2 eta dlam^2`).
    pub fn collapse_x(&self, eta: f64, dlam: f64) -> f64 {
        self.c1 * eta.sqrt() * dlam
    }

    /// Collapse ordinate `c2 dlam <x^2>`; theory points satisfy `y = u Q(u)`.
    pub fn collapse_y(&self, dlam: f64, x2: f64) -> f64 {
        self.c2 * dlam * x2
    }

    /// `<x^2>` from the quartic theory with `alpha^2 = -Lambda dlam` and the
    /// remaining coefficients frozen at the critical point.
    pub fn x2_linearized(&self, eta: f64, dlam: f64) -> f64 {
        let cp = &self.critical;
        2.0 * cp.p_minus * (eta * cp.temperature / cp.beta_cu).sqrt() * q_function(self.collapse_x(eta, dlam))
    }
}

/// Universal collapse curve `u Q(u)`.
pub fn collapse_curve(u: f64) -> f64 {
    u * q_function(u)
}

/// `<a^dag a>` from `<x^2>` using `p ~ kappa x / alpha_y`, floored at 0.
pub fn photon_from_x2(d: &DimlessParams, x2: f64) -> Result<f64> {
    let alpha_y = 1.0 - d.lam_y * d.lam_y;
    if alpha_y == 0.0 {
        return Err(Error::SingularQuadratic);
    }
    let ratio = d.kappa_ratio / alpha_y;
    Ok((0.5 * (x2 * (1.0 + ratio * ratio) - 1.0)).max(0.0))
}

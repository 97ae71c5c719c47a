//! Effective spin-flip rates, stationary populations and the infinite-eta
//! steady-state phase.
//!
//! Slow transitions between mean-field attractors are modelled as two-state
//! Markov chains; rates are in units of `omega_c`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meanfield::{classify_mf, stable_sp, FixedPoint, Region};
use crate::model::{DimlessParams, ModelParams};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateContext {
    NP,
    SP,
}

/// `gamma_up_down` drives the upper state of the pair into the lower one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSet {
    pub gamma_up_down: f64,
    pub gamma_down_up: f64,
    pub context: RateContext,
}

/// Stationary occupation `(p_a, p_b)` of a two-state chain with rates
/// `a -> b` and `b -> a`.
pub fn two_state_stationary(rate_ab: f64, rate_ba: f64) -> Result<(f64, f64)> {
    let total = rate_ab + rate_ba;
    if !(total > 0.0) {
        return Err(Error::UndefinedCouplings);
    }
    Ok((rate_ba / total, rate_ab / total))
}

/// Rates between NP_up and NP_down.
pub fn np_rates(d: &DimlessParams) -> RateSet {
    let f = d.kappa_ratio / (2.0 * d.eta);
    RateSet {
        gamma_up_down: d.lam_m * d.lam_m * f,
        gamma_down_up: d.lam_p * d.lam_p * f,
        context: RateContext::NP,
    }
}

/// `(P_plus, P_minus)`: populations of NP_up and NP_down.
pub fn np_populations(d: &DimlessParams) -> Result<(f64, f64)> {
    let (lm2, lp2) = (d.lam_m * d.lam_m, d.lam_p * d.lam_p);
    let total = lm2 + lp2;
    if total == 0.0 {
        return Err(Error::UndefinedCouplings);
    }
    Ok((lp2 / total, lm2 / total))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EffectiveTemperature {
    Finite(f64),
    /// Isotropic coupling.
    PlusInfinity,
    /// `lambda_plus = 0`: pure relaxation, `T -> +0`.
    PlusZero,
    /// `lambda_minus = 0`: pure pumping, `T -> -0`.
    MinusZero,
}

impl EffectiveTemperature {
    pub fn value(self) -> f64 {
        match self {
            EffectiveTemperature::Finite(t) => t,
            EffectiveTemperature::PlusInfinity => f64::INFINITY,
            EffectiveTemperature::PlusZero => 0.0,
            EffectiveTemperature::MinusZero => -0.0,
        }
    }
}

/// `Omega / (2 ln(lambda_minus / lambda_plus))`, signed.
pub fn effective_temperature(p: &ModelParams) -> Result<EffectiveTemperature> {
    p.validate()?;
    let (lm, lp) = (p.lambda_minus.abs(), p.lambda_plus.abs());
    Ok(match (lm == 0.0, lp == 0.0) {
        (true, true) => return Err(Error::UndefinedCouplings),
        (false, true) => EffectiveTemperature::PlusZero,
        (true, false) => EffectiveTemperature::MinusZero,
        _ if lm == lp => EffectiveTemperature::PlusInfinity,
        _ => EffectiveTemperature::Finite(p.omega / (2.0 * (lm / lp).ln())),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiCouplings {
    pub chi_minus: C64,
    pub chi_plus: C64,
    pub chi_z: C64,
}

/// Couplings of the cavity fluctuation to the spin in the frame rotated onto
/// the superradiant spin direction `(theta, phi)`.
pub fn chi_couplings(d: &DimlessParams, theta: f64, phi: f64) -> ChiCouplings {
    let (lm, lp) = (d.lam_m, d.lam_p);
    let c2 = (0.5 * theta).cos().powi(2);
    let s2 = (0.5 * theta).sin().powi(2);
    let e = C64::from_polar(1.0, phi);
    let ec = e.conj();
    ChiCouplings {
        chi_plus: lp * e * c2 - lm * ec * s2,
        chi_minus: lm * e * c2 - lp * ec * s2,
        chi_z: -0.5 * theta.sin() * (lm * e + lp * ec),
    }
}

fn require_sp(d: &DimlessParams) -> Result<FixedPoint> {
    stable_sp(d).ok_or(Error::NoSuperradiantPhase)
}

/// Rates between SP_up and SP_down, with the `cos^2 theta` polarization factor.
pub fn sp_rates(d: &DimlessParams) -> Result<RateSet> {
    let sp = require_sp(d)?;
    let chi = chi_couplings(d, sp.theta, sp.phi);
    let f = d.kappa_ratio * sp.cos_theta().powi(2) / (2.0 * d.eta);
    Ok(RateSet {
        gamma_up_down: chi.chi_minus.norm_sqr() * f,
        gamma_down_up: chi.chi_plus.norm_sqr() * f,
        context: RateContext::SP,
    })
}

/// Contracted chain rates `(NP_up -> SP_down, SP_down -> NP_up)`.
pub fn sp_chain_rates(d: &DimlessParams) -> Result<(f64, f64)> {
    let into_sp = np_rates(d).gamma_up_down;
    let out_of_sp = sp_rates(d)?.gamma_down_up;
    Ok((into_sp, out_of_sp))
}

pub fn sp_population(d: &DimlessParams) -> Result<f64> {
    let (into_sp, out_of_sp) = sp_chain_rates(d)?;
    let (_, p_sp) = two_state_stationary(into_sp, out_of_sp)?;
    Ok(p_sp)
}

/// `<a^dag a> / eta = P_SP |c|^2`, zero without a superradiant point.
pub fn predicted_photon_number(d: &DimlessParams) -> f64 {
    match stable_sp(d) {
        Some(sp) => sp_population(d).map(|p| p * sp.abs_c_sq()).unwrap_or(0.0),
        None => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SteadyPhase {
    NP,
    SP,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Populations {
    pub np_up: f64,
    pub np_down: f64,
    pub sp_down: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryPrediction {
    pub phase: SteadyPhase,
    pub populations: Populations,
    pub n_photon_over_eta: f64,
    pub sigma_z: f64,
}

/// Infinite-eta steady state. The coexistence region behaves as NP since the
/// system, once in NP_up, relaxes into the stable NP_down and never returns.
pub fn steady_phase(d: &DimlessParams) -> Result<StationaryPrediction> {
    let mf = classify_mf(d);
    if mf.region == Region::SP {
        if let Some(sp) = mf.sp() {
            let p_sp = sp_population(d)?;
            return Ok(StationaryPrediction {
                phase: SteadyPhase::SP,
                populations: Populations {
                    np_up: 1.0 - p_sp,
                    np_down: 0.0,
                    sp_down: p_sp,
                },
                n_photon_over_eta: p_sp * sp.abs_c_sq(),
                sigma_z: (1.0 - p_sp) - p_sp * sp.cos_theta(),
            });
        }
    }
    let (p_plus, p_minus) = np_populations(d)?;
    Ok(StationaryPrediction {
        phase: SteadyPhase::NP,
        populations: Populations {
            np_up: p_plus,
            np_down: p_minus,
            sp_down: 0.0,
        },
        n_photon_over_eta: 0.0,
        sigma_z: p_plus - p_minus,
    })
}

//! Mean-field flow, fixed points, stability and the infinite-eta phase diagram.
//!
//! Time is `tau = omega_c t`, the cavity amplitude is `c = <a>/sqrt(eta)` and
//! couplings are the rescaled `lam_m`, `lam_p`. Frequencies are in units of
//! `omega_c`, so `kappa_ratio` is the bare loss rate here.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DimlessParams;

type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

/// Residual bound every returned fixed point satisfies.
pub const FIXED_POINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MFState {
    pub c: C64,
    pub s_plus: C64,
    pub s_z: f64,
}

impl MFState {
    pub fn np(spin_up: bool) -> Self {
        Self {
            c: C64::new(0.0, 0.0),
            s_plus: C64::new(0.0, 0.0),
            s_z: if spin_up { 1.0 } else { -1.0 },
        }
    }

    /// `4 |s+|^2 + sz^2`, equal to 1 on the physical sphere.
    pub fn pseudo_spin_norm(&self) -> f64 {
        4.0 * self.s_plus.norm_sqr() + self.s_z * self.s_z
    }
}

/// Time derivative of the full mean-field state. `s_z` of the result is
/// the real part of the spin equation; the imaginary part vanishes identically.
pub fn mf_rhs_full(s: &MFState, d: &DimlessParams) -> MFState {
    let (lm, lp, k) = (d.lam_m, d.lam_p, d.kappa_ratio);
    let s_minus = s.s_plus.conj();
    let dc = -(k + I) * s.c + 0.5 * I * (lm * s_minus + lp * s.s_plus);
    let ds = d.eta * (I * d.omega_sign * s.s_plus + 0.5 * I * (lm * s.c.conj() + lp * s.c) * s.s_z);
    let dz = mf_sz_rate(s, d);
    MFState {
        c: dc,
        s_plus: ds,
        s_z: dz.re,
    }
}

/// Complex-valued right-hand side of the `s_z` equation (its imaginary part is
/// zero up to rounding).
pub fn mf_sz_rate(s: &MFState, d: &DimlessParams) -> C64 {
    let s_minus = s.s_plus.conj();
    let c = s.c;
    d.eta
        * (I * d.lam_m * (c * s.s_plus - c.conj() * s_minus)
            - I * d.lam_p * (c * s_minus - c.conj() * s.s_plus))
}

/// One classic RK4 step of the full flow.
pub fn rk4_step(s: &MFState, d: &DimlessParams, dt: f64) -> MFState {
    let add = |a: &MFState, k: &MFState, h: f64| MFState {
        c: a.c + k.c * h,
        s_plus: a.s_plus + k.s_plus * h,
        s_z: a.s_z + k.s_z * h,
    };
    let k1 = mf_rhs_full(s, d);
    let k2 = mf_rhs_full(&add(s, &k1, 0.5 * dt), d);
    let k3 = mf_rhs_full(&add(s, &k2, 0.5 * dt), d);
    let k4 = mf_rhs_full(&add(s, &k3, dt), d);
    MFState {
        c: s.c + (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c) * (dt / 6.0),
        s_plus: s.s_plus + (k1.s_plus + 2.0 * k2.s_plus + 2.0 * k3.s_plus + k4.s_plus) * (dt / 6.0),
        s_z: s.s_z + (k1.s_z + 2.0 * k2.s_z + 2.0 * k3.s_z + k4.s_z) * (dt / 6.0),
    }
}

pub fn integrate_full(s0: &MFState, d: &DimlessParams, dt: f64, steps: usize) -> MFState {
    (0..steps).fold(*s0, |s, _| rk4_step(&s, d, dt))
}

fn coupling_field(c: C64, d: &DimlessParams) -> C64 {
    d.lam_m * c.conj() + d.lam_p * c
}

/// Spin slaved to the cavity amplitude on branch `+1` (aligned with the
/// field, NP_up side) or `-1`.
pub fn adiabatic_spin(c: C64, d: &DimlessParams, branch: f64) -> (f64, C64) {
    let g = coupling_field(c, d);
    let sz = branch / (1.0 + g.norm_sqr()).sqrt();
    (sz, -0.5 * g * sz)
}

/// Cavity flow with the spin eliminated adiabatically.
pub fn mf_rhs_adiabatic(c: C64, d: &DimlessParams, branch: f64) -> C64 {
    let (lm, lp) = (d.lam_m, d.lam_p);
    let g = coupling_field(c, d);
    let drive = (lm * lm + lp * lp) * c + 2.0 * lm * lp * c.conj();
    -(d.kappa_ratio + I) * c - branch * 0.25 * I * drive / (1.0 + g.norm_sqr()).sqrt()
}

/// Real 2x2 Jacobian of `mf_rhs_adiabatic` in `(Re c, Im c)`, by central differences.
pub fn jacobian_adiabatic(c: C64, d: &DimlessParams, branch: f64) -> [[f64; 2]; 2] {
    let h = 1e-5 * c.norm().max(1.0);
    let col = |dir: C64| {
        let fp = mf_rhs_adiabatic(c + dir * h, d, branch);
        let fm = mf_rhs_adiabatic(c - dir * h, d, branch);
        (fp - fm) / (2.0 * h)
    };
    let jx = col(C64::new(1.0, 0.0));
    let jy = col(I);
    [[jx.re, jy.re], [jx.im, jy.im]]
}

pub fn eigenvalues_2x2(j: &[[f64; 2]; 2]) -> [C64; 2] {
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = C64::new(0.25 * tr * tr - det, 0.0).sqrt();
    [0.5 * tr + disc, 0.5 * tr - disc]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FixedPointKind {
    #[serde(rename = "NP_up")]
    NpUp,
    #[serde(rename = "NP_down")]
    NpDown,
    #[serde(rename = "SP_down_plus")]
    SpDownPlus,
    #[serde(rename = "SP_down_minus")]
    SpDownMinus,
    #[serde(rename = "SP_unstable")]
    SpUnstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub kind: FixedPointKind,
    pub state: MFState,
    /// Polar angle of the spin (`cos theta = -s_z` on the lower branch); 0 for NP points.
    pub theta: f64,
    pub phi: f64,
    pub jacobian_eigs: [C64; 2],
    pub stable: bool,
}

impl FixedPoint {
    fn with_jacobian(kind: FixedPointKind, state: MFState, theta: f64, phi: f64, d: &DimlessParams, branch: f64) -> Self {
        let eigs = eigenvalues_2x2(&jacobian_adiabatic(state.c, d, branch));
        Self {
            kind,
            state,
            theta,
            phi,
            jacobian_eigs: eigs,
            stable: eigs.iter().all(|e| e.re < 0.0),
        }
    }

    pub fn abs_c_sq(&self) -> f64 {
        self.state.c.norm_sqr()
    }

    pub fn cos_theta(&self) -> f64 {
        self.theta.cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalBranch {
    Up,
    Down,
}

pub fn np_stability(d: &DimlessParams, which: NormalBranch) -> FixedPoint {
    let (branch, kind, up) = match which {
        NormalBranch::Up => (1.0, FixedPointKind::NpUp, true),
        NormalBranch::Down => (-1.0, FixedPointKind::NpDown, false),
    };
    FixedPoint::with_jacobian(kind, MFState::np(up), 0.0, 0.0, d, branch)
}

/// Superradiant fixed points on the lower spin branch: both broken-symmetry
/// partners of the physical root and, when real, of the second root
/// (tagged `SpUnstable`). Empty when no root exists.
pub fn sp_fixed_points(d: &DimlessParams) -> Vec<FixedPoint> {
    let (lm, lp, k) = (d.lam_m, d.lam_p, d.kappa_ratio);
    let (lm2, lp2) = (lm * lm, lp * lp);
    let disc = 4.0 * lp2 * lm2 - k * k * (lm2 - lp2).powi(2);
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let sin2phi = if lm * lp == 0.0 {
        if k * (lm2 - lp2) == 0.0 {
            0.0
        } else {
            return Vec::new();
        }
    } else {
        (-k * (lm2 - lp2) / (2.0 * lm * lp)).clamp(-1.0, 1.0)
    };
    let half = sin2phi.asin();
    let phi_candidates = [0.5 * half, 0.5 * (std::f64::consts::PI - half)];

    let mut out = Vec::new();
    for (root_sign, kinds) in [
        (1.0, [FixedPointKind::SpDownPlus, FixedPointKind::SpDownMinus]),
        (-1.0, [FixedPointKind::SpUnstable, FixedPointKind::SpUnstable]),
    ] {
        if root_sign < 0.0 && sq == 0.0 {
            continue;
        }
        let denom = lm2 + lp2 + root_sign * sq;
        if denom <= 0.0 {
            continue;
        }
        let cos_theta = 4.0 * (1.0 + k * k) / denom;
        if cos_theta > 1.0 {
            continue;
        }
        let theta = cos_theta.acos();
        let build = |phi: f64, sign: f64| {
            let s_plus = sign * 0.5 * C64::from_polar(1.0, phi) * theta.sin();
            let c = (lm * s_plus.conj() + lp * s_plus) / (2.0 * (1.0 - I * k));
            MFState {
                c,
                s_plus,
                s_z: -cos_theta,
            }
        };
        let Some((phi, _)) = phi_candidates
            .iter()
            .map(|&phi| {
                let c = build(phi, 1.0).c;
                let spin_mismatch = (adiabatic_spin(c, d, -1.0).0 + cos_theta).abs();
                (phi, mf_rhs_adiabatic(c, d, -1.0).norm().max(spin_mismatch))
            })
            .filter(|(_, res)| *res <= FIXED_POINT_TOL)
            .min_by(|a, b| a.1.total_cmp(&b.1))
        else {
            continue;
        };
        for (kind, sign) in kinds.into_iter().zip([1.0, -1.0]) {
            let state = build(phi, sign);
            let phi_k = if sign > 0.0 { phi } else { phi + std::f64::consts::PI };
            out.push(FixedPoint::with_jacobian(kind, state, theta, phi_k, d, -1.0));
        }
    }
    out
}

/// The `SP_down_plus` point when it exists and is stable.
pub fn stable_sp(d: &DimlessParams) -> Option<FixedPoint> {
    sp_fixed_points(d)
        .into_iter()
        .find(|f| f.kind == FixedPointKind::SpDownPlus && f.stable)
}

pub fn stable_sp_amplitude_sq(d: &DimlessParams) -> Option<f64> {
    stable_sp(d).map(|f| f.abs_c_sq())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioBounds {
    pub r_minus: f64,
    pub r_plus: f64,
    /// Set for `kappa_ratio = 0`, where the window is all of `r > 0`.
    pub degenerate: bool,
}

/// Ratios `r = lam_p / lam_m` bounding the wedge where NP_down can destabilize.
pub fn boundary_r_pm(kappa_ratio: f64) -> RatioBounds {
    if kappa_ratio <= 0.0 {
        return RatioBounds {
            r_minus: 0.0,
            r_plus: f64::INFINITY,
            degenerate: true,
        };
    }
    let inv = 1.0 / kappa_ratio;
    let root = (1.0 + inv * inv).sqrt();
    RatioBounds {
        r_minus: 1.0 / (root + inv),
        r_plus: root + inv,
        degenerate: false,
    }
}

/// Lower and upper couplings `lam_m` between which NP_down is unstable along `lam_p = r lam_m`.
pub fn boundary_lambda_c(r: f64, kappa_ratio: f64) -> Result<(f64, f64)> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParams(format!("ratio r must be finite and >= 0, got {r}")));
    }
    if r == 1.0 {
        return Ok(((1.0 + kappa_ratio * kappa_ratio).sqrt(), f64::INFINITY));
    }
    let b = boundary_r_pm(kappa_ratio);
    let slack = 1e-12 * r.max(1.0);
    if r < b.r_minus - slack || r > b.r_plus + slack {
        return Err(Error::OutsideRatioWindow {
            r,
            r_minus: b.r_minus,
            r_plus: b.r_plus,
        });
    }
    let w = 1.0 - r * r;
    let inner = (4.0 * r * r - w * w * kappa_ratio * kappa_ratio).max(0.0).sqrt();
    let lo = 2.0 * (1.0 + r * r - inner).sqrt() / w.abs();
    let hi = 2.0 * (1.0 + r * r + inner).sqrt() / w.abs();
    Ok((lo, hi))
}

pub fn tricritical_lambda(kappa_ratio: f64) -> f64 {
    let s = (1.0 + kappa_ratio * kappa_ratio).sqrt();
    (2.0 * (s * s + s)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    NP,
    SP,
    C,
}

impl Region {
    pub fn as_str(self) -> &'static str {
        match self {
            Region::NP => "NP",
            Region::SP => "SP",
            Region::C => "C",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MFPhase {
    pub region: Region,
    pub stable_points: Vec<FixedPoint>,
}

impl MFPhase {
    pub fn sp(&self) -> Option<&FixedPoint> {
        self.stable_points
            .iter()
            .find(|f| f.kind == FixedPointKind::SpDownPlus)
    }
}

/// Region from the stability of NP_down and the existence of a stable SP_down.
/// A lower branch with neither attractor (not encountered for `kappa > 0`) is
/// reported as `SP`, since NP_down cannot hold the system.
pub fn classify_mf(d: &DimlessParams) -> MFPhase {
    let up = np_stability(d, NormalBranch::Up);
    let down = np_stability(d, NormalBranch::Down);
    let sps: Vec<FixedPoint> = sp_fixed_points(d)
        .into_iter()
        .filter(|f| f.stable && f.kind != FixedPointKind::SpUnstable)
        .collect();
    let region = match (down.stable, !sps.is_empty()) {
        (true, false) => Region::NP,
        (true, true) => Region::C,
        (false, _) => Region::SP,
    };
    let mut stable_points: Vec<FixedPoint> = [up, down].into_iter().filter(|f| f.stable).collect();
    stable_points.extend(sps);
    MFPhase {
        region,
        stable_points,
    }
}

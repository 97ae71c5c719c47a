//! Second-order cumulant equations and the normal-phase stationary spin.
//!
//! Only one member of each Hermitian-conjugate pair is stored; third-order
//! moments are factorized as
//! `<ABC> = <AB><C> + <AC><B> + <BC><A> - 2<A><B><C>`.

use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::ode::{integrate, OdeOptions};

type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

pub const STATE_LEN: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CumulantState {
    pub a_mean: C64,
    /// `<s+>`
    pub sp_mean: C64,
    pub sz_mean: f64,
    /// `<a^dag a>`
    pub n: f64,
    /// `<a^2>`
    pub a2: C64,
    /// `<a s+>`
    pub a_sp: C64,
    /// `<a s->`
    pub a_sm: C64,
    /// `<a sz>`
    pub a_sz: C64,
}

impl CumulantState {
    /// Uncorrelated state with the cavity in vacuum and the spin along `sz = +-1`.
    pub fn vacuum(spin_up: bool) -> Self {
        let z = C64::new(0.0, 0.0);
        Self {
            a_mean: z,
            sp_mean: z,
            sz_mean: if spin_up { 1.0 } else { -1.0 },
            n: 0.0,
            a2: z,
            a_sp: z,
            a_sm: z,
            a_sz: z,
        }
    }

    pub fn to_vec(&self) -> [f64; STATE_LEN] {
        [
            self.a_mean.re,
            self.a_mean.im,
            self.sp_mean.re,
            self.sp_mean.im,
            self.sz_mean,
            self.n,
            self.a2.re,
            self.a2.im,
            self.a_sp.re,
            self.a_sp.im,
            self.a_sm.re,
            self.a_sm.im,
            self.a_sz.re,
            self.a_sz.im,
        ]
    }

    pub fn from_slice(v: &[f64]) -> Self {
        assert_eq!(v.len(), STATE_LEN);
        Self {
            a_mean: C64::new(v[0], v[1]),
            sp_mean: C64::new(v[2], v[3]),
            sz_mean: v[4],
            n: v[5],
            a2: C64::new(v[6], v[7]),
            a_sp: C64::new(v[8], v[9]),
            a_sm: C64::new(v[10], v[11]),
            a_sz: C64::new(v[12], v[13]),
        }
    }

    /// `<a^dag a> + (1 + <sz>)/2`, conserved when `lambda_plus = kappa = 0`.
    pub fn excitation_number(&self) -> f64 {
        self.n + 0.5 * (1.0 + self.sz_mean)
    }
}

pub fn cumulant_rhs(s: &CumulantState, p: &ModelParams) -> CumulantState {
    let (wc, om, lm, lp, k) = (p.omega_c, p.omega, p.lambda_minus, p.lambda_plus, p.kappa);
    let al = s.a_mean;
    let sp = s.sp_mean;
    let sm = sp.conj();
    let z = s.sz_mean;
    let zc = C64::new(z, 0.0);
    let n = C64::new(s.n, 0.0);
    let (xp, xm, za) = (s.a_sp, s.a_sm, s.a_sz);
    let abs_al2 = al.norm_sqr();

    // closures of the third-order moments
    let ad_a_sz = n * zc + za.conj() * al + za * al.conj() - 2.0 * abs_al2 * zc;
    let a2_sz = s.a2 * zc + 2.0 * za * al - 2.0 * al * al * zc;
    let a2_sp = s.a2 * sp + 2.0 * xp * al - 2.0 * al * al * sp;
    let a2_sm = s.a2 * sm + 2.0 * xm * al - 2.0 * al * al * sm;
    let ad_a_sm = n * sm + xp.conj() * al + xm * al.conj() - 2.0 * abs_al2 * sm;
    let ad_a_sp = n * sp + xm.conj() * al + xp * al.conj() - 2.0 * abs_al2 * sp;

    let up_pop = 0.5 * (1.0 + z);
    let down_pop = 0.5 * (1.0 - z);

    let d_a = -(k + I * wc) * al + I * (lm * sm + lp * sp);
    let d_sp = I * om * sp + I * (lm * za.conj() + lp * za);
    let d_sz = -4.0 * (lm * xp.im - lp * xm.im);
    let d_n = 2.0 * lm * xp.im + 2.0 * lp * xm.im - 2.0 * k * s.n;
    let d_a2 = -2.0 * (k + I * wc) * s.a2 + 2.0 * I * (lm * xm + lp * xp);
    let d_xp = -(k + I * wc - I * om) * xp + I * lm * up_pop + I * lm * ad_a_sz + I * lp * a2_sz;
    let d_xm = -(k + I * wc + I * om) * xm - I * lm * a2_sz - I * lp * (ad_a_sz - down_pop);
    let d_za = -(k + I * wc) * za
        + 2.0 * I * (lm * (a2_sp - ad_a_sm) - lp * (a2_sm - ad_a_sp))
        - I * lm * sm
        + I * lp * sp;

    CumulantState {
        a_mean: d_a,
        sp_mean: d_sp,
        sz_mean: d_sz,
        n: d_n,
        a2: d_a2,
        a_sp: d_xp,
        a_sm: d_xm,
        a_sz: d_za,
    }
}

fn check_couplings(p: &ModelParams) -> Result<()> {
    p.validate()?;
    if p.lambda_minus == 0.0 && p.lambda_plus == 0.0 {
        return Err(Error::UndefinedCouplings);
    }
    Ok(())
}

/// Closed-form normal-phase correction to `<sz>`.
pub fn delta_correction(p: &ModelParams) -> f64 {
    let (wc, om, k) = (p.omega_c, p.omega, p.kappa);
    let (lm2, lp2) = (p.lambda_minus.powi(2), p.lambda_plus.powi(2));
    let ld2 = lm2 - lp2;
    let loss = k * k + wc * wc;
    let num = 4.0 * lm2 * lp2 * (4.0 * wc * wc * ld2 - 2.0 * wc * om * loss);
    let den = ld2.powi(4) - (lm2 + lp2).powi(2) * (2.0 * wc * om * ld2 - om * om * loss);
    num / den
}

/// `(lp^2 - lm^2)/(lm^2 + lp^2) + Delta`.
pub fn stationary_normal(p: &ModelParams) -> Result<f64> {
    check_couplings(p)?;
    Ok(leading_sigma_z(p) + delta_correction(p))
}

/// Infinite-eta normal-phase value `(lp^2 - lm^2)/(lm^2 + lp^2)`.
pub fn leading_sigma_z(p: &ModelParams) -> f64 {
    let (lm2, lp2) = (p.lambda_minus.powi(2), p.lambda_plus.powi(2));
    (lp2 - lm2) / (lm2 + lp2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalMoments {
    pub sz: f64,
    pub n: f64,
    pub a2: C64,
    pub a_sp: C64,
    pub a_sm: C64,
    pub iterations: usize,
}

const REDUCED_LEN: usize = 8;

fn reduced_state(x: &[f64]) -> CumulantState {
    let z = C64::new(0.0, 0.0);
    CumulantState {
        a_mean: z,
        sp_mean: z,
        sz_mean: x[1],
        n: x[0],
        a2: C64::new(x[2], x[3]),
        a_sp: C64::new(x[4], x[5]),
        a_sm: C64::new(x[6], x[7]),
        a_sz: z,
    }
}

fn reduced_residual(x: &[f64], p: &ModelParams) -> [f64; REDUCED_LEN] {
    let d = cumulant_rhs(&reduced_state(x), p);
    [d.n, d.sz_mean, d.a2.re, d.a2.im, d.a_sp.re, d.a_sp.im, d.a_sm.re, d.a_sm.im]
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Stationary moments of the cumulant equations in the `<a> = <s+-> = <a sz> = 0`
/// sector, by damped Newton iteration from `sz = 0`.
pub fn stationary_normal_numeric(p: &ModelParams) -> Result<NormalMoments> {
    check_couplings(p)?;
    const MAX_ITER: usize = 200;
    let scale = p.omega_c + p.omega.abs() + p.lambda_minus.abs() + p.lambda_plus.abs() + p.kappa;
    let tol = 1e-14 * scale;
    let mut x = [0.0f64; REDUCED_LEN];
    let mut f = reduced_residual(&x, p);
    for it in 0..MAX_ITER {
        if inf_norm(&f) <= tol {
            return Ok(finish(&x, it));
        }
        let mut jac = Mat::<f64>::zeros(REDUCED_LEN, REDUCED_LEN);
        for j in 0..REDUCED_LEN {
            let h = 1e-7 * x[j].abs().max(1e-3);
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let (fp, fm) = (reduced_residual(&xp, p), reduced_residual(&xm, p));
            for i in 0..REDUCED_LEN {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let rhs = Mat::<f64>::from_fn(REDUCED_LEN, 1, |i, _| -f[i]);
        let dx = jac.partial_piv_lu().solve(&rhs);
        let mut t = 1.0;
        let f0 = inf_norm(&f);
        loop {
            let mut trial = x;
            for i in 0..REDUCED_LEN {
                trial[i] += t * dx[(i, 0)];
            }
            let ft = reduced_residual(&trial, p);
            if inf_norm(&ft) < f0 || t < 1e-6 {
                x = trial;
                f = ft;
                break;
            }
            t *= 0.5;
        }
        if x.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    if inf_norm(&f) <= tol {
        return Ok(finish(&x, MAX_ITER));
    }
    Err(Error::NewtonDiverged {
        iterations: MAX_ITER,
        residual: inf_norm(&f),
    })
}

fn finish(x: &[f64], iterations: usize) -> NormalMoments {
    let s = reduced_state(x);
    NormalMoments {
        sz: s.sz_mean,
        n: s.n,
        a2: s.a2,
        a_sp: s.a_sp,
        a_sm: s.a_sm,
        iterations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CumulantSample {
    pub tau: f64,
    pub state: CumulantState,
}

/// Integrates the cumulant equations (time in `1/omega_c`) with the step
/// capped at `0.1 / omega_c`.
pub fn integrate_cumulants(
    s0: &CumulantState,
    p: &ModelParams,
    sample_times: &[f64],
    rtol: f64,
) -> Result<Vec<CumulantSample>> {
    p.validate()?;
    let opts = OdeOptions {
        rtol,
        atol: rtol * 1e-3,
        h_max: 0.1 / p.omega_c,
        ..OdeOptions::default()
    };
    let mut out = Vec::with_capacity(sample_times.len());
    integrate(
        |_, y: &[f64], dy: &mut [f64]| {
            let d = cumulant_rhs(&CumulantState::from_slice(y), p).to_vec();
            dy.copy_from_slice(&d);
        },
        0.0,
        s0.to_vec().to_vec(),
        sample_times,
        &opts,
        |_| {},
        |t, y| {
            out.push(CumulantSample {
                tau: t,
                state: CumulantState::from_slice(y),
            });
            Ok(())
        },
    )?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn iso(eta: f64, lam: f64) -> ModelParams {
        ModelParams::from_dimensionless(eta, lam, lam, 0.5)
    }

    #[test]
    fn zero_coupling_vacuum_is_stationary() {
        let p = ModelParams::new(1.0, 100.0, 0.0, 0.0, 0.5);
        for up in [true, false] {
            let d = cumulant_rhs(&CumulantState::vacuum(up), &p);
            assert!(d.to_vec().iter().all(|v| *v == 0.0));
        }
        // the source of <a s+> vanishes on the lower spin state
        let p = ModelParams::new(1.0, 100.0, 3.0, 0.0, 0.5);
        let d = cumulant_rhs(&CumulantState::vacuum(false), &p);
        assert_eq!(d.sz_mean, 0.0);
        assert_eq!(d.a_sp, C64::new(0.0, 0.0));
    }

    #[test]
    fn isotropic_closed_form() {
        for eta in [10.0, 100.0, 400.0] {
            assert_relative_eq!(stationary_normal(&iso(eta, 0.618)).unwrap(), -2.0 / eta, epsilon = 1e-14);
        }
        let p = ModelParams::from_dimensionless(100.0, 1.0, 3.0, 0.5);
        assert_relative_eq!(leading_sigma_z(&p), 0.8, epsilon = 1e-14);
        let p = ModelParams::from_dimensionless(1e8, 1.0, 3.0, 0.5);
        assert_relative_eq!(stationary_normal(&p).unwrap(), 0.8, epsilon = 1e-6);
        assert!(matches!(
            stationary_normal(&ModelParams::new(1.0, 10.0, 0.0, 0.0, 0.5)),
            Err(Error::UndefinedCouplings)
        ));
    }

    #[test]
    fn newton_matches_closed_form_to_second_order() {
        for eta in [50.0, 100.0, 200.0] {
            let p = iso(eta, 0.618);
            let num = stationary_normal_numeric(&p).unwrap();
            let closed = stationary_normal(&p).unwrap();
            assert!((num.sz - closed).abs() <= 5.0 / (eta * eta), "eta = {eta}");
        }
        let num = stationary_normal_numeric(&iso(100.0, 0.618)).unwrap();
        assert_relative_eq!(num.sz, -0.02, epsilon = 1e-4);
    }

    #[test]
    fn jaynes_cummings_conserves_excitations() {
        let p = ModelParams::new(1.0, 1.3, 0.2, 0.0, 0.0);
        // product of a coherent state and a pure spin with <sz> = 0.6
        let al = C64::new(0.4, 0.1);
        let sp = C64::from_polar(0.4, 0.3);
        let sz = 0.6;
        let s0 = CumulantState {
            a_mean: al,
            sp_mean: sp,
            sz_mean: sz,
            n: al.norm_sqr(),
            a2: al * al,
            a_sp: al * sp,
            a_sm: al * sp.conj(),
            a_sz: al * sz,
        };
        let traj = integrate_cumulants(&s0, &p, &[10.0, 25.0, 50.0], 1e-12).unwrap();
        for s in traj {
            assert!((s.state.excitation_number() - s0.excitation_number()).abs() < 1e-10);
        }
    }

    #[test]
    fn long_time_limit_matches_newton() {
        let p = iso(100.0, 0.618);
        let num = stationary_normal_numeric(&p).unwrap();
        let mut finals = Vec::new();
        for up in [true, false] {
            let traj = integrate_cumulants(&CumulantState::vacuum(up), &p, &[8000.0], 1e-10).unwrap();
            finals.push(traj[0].state.sz_mean);
        }
                for f in &finals {
            assert!((f - num.sz).abs() <= 1e-6, "{finals:?} vs {}", num.sz);
        }
    }

    proptest! {
        #[test]
        fn delta_isotropic_identity(wc in 0.1f64..10.0, om in 0.1f64..1000.0, k in 0.0f64..5.0, lam in 0.01f64..50.0) {
            let p = ModelParams::new(wc, om, lam, lam, k);
            let delta = delta_correction(&p);
            prop_assert!((delta + 2.0 * wc / om).abs() <= 1e-12 * (1.0 + 2.0 * wc / om));
        }

        #[test]
        fn real_moments_stay_real(seed in proptest::collection::vec(-1.0f64..1.0, STATE_LEN)) {
            let s = CumulantState::from_slice(&seed);
            let d = cumulant_rhs(&s, &ModelParams::new(1.0, 5.0, 0.8, 0.3, 0.4));
            // d<sz> and d<n> are the real combinations of complex moments
            let direct_sz = 2.0 * I * (0.8 * (s.a_sp - s.a_sp.conj()) - 0.3 * (s.a_sm - s.a_sm.conj()));
            prop_assert!(direct_sz.im.abs() < 1e-14);
            prop_assert!((direct_sz.re - d.sz_mean).abs() < 1e-12);
        }
    }
}

//! Adaptive Dormand–Prince 5(4) integrator over real or complex vectors.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub trait Element: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn modulus(self) -> f64;
}

impl Element for f64 {
    fn zero() -> Self {
        0.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Element for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            h_max: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth- minus fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combine<T: Element>(out: &mut [T], y: &[T], h: f64, terms: &[(f64, &[T])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = T::zero();
        for &(c, k) in terms {
            if c != 0.0 {
                acc = acc + k[i] * c;
            }
        }
        *o = y[i] + acc * h;
    }
}

/// Integrates `dy/dt = f(t, y)` from `t0` through the sorted `sample_times`
/// (all `>= t0`), calling `observe` exactly at each sample time. `post_step`
/// may project the state after every accepted step. Returns the final state.
pub fn integrate<T, F, P, O>(
    mut f: F,
    t0: f64,
    y0: Vec<T>,
    sample_times: &[f64],
    opts: &OdeOptions,
    mut post_step: P,
    mut observe: O,
) -> Result<Vec<T>>
where
    T: Element,
    F: FnMut(f64, &[T], &mut [T]),
    P: FnMut(&mut [T]),
    O: FnMut(f64, &[T]) -> Result<()>,
{
    let n = y0.len();
    let mut y = y0;
    let mut t = t0;
    let mut k1 = vec![T::zero(); n];
    let mut k2 = vec![T::zero(); n];
    let mut k3 = vec![T::zero(); n];
    let mut k4 = vec![T::zero(); n];
    let mut k5 = vec![T::zero(); n];
    let mut k6 = vec![T::zero(); n];
    let mut k7 = vec![T::zero(); n];
    let mut tmp = vec![T::zero(); n];
    let mut y_new = vec![T::zero(); n];
    f(t, &y, &mut k1);

    let mut h = initial_step(&mut f, t, &y, &k1, opts);
    let mut steps = 0usize;
    for &ts in sample_times {
        assert!(ts >= t, "sample times must be sorted and >= t0");
        while t < ts {
            if steps >= opts.max_steps {
                return Err(Error::TooManySteps(opts.max_steps));
            }
            let remaining = ts - t;
            let last = h >= remaining;
            let hs = if last { remaining } else { h };
            if hs <= 1e-14 * t.abs().max(1.0) && !last {
                return Err(Error::StepSizeUnderflow { time: t, step: hs });
            }

            combine(&mut tmp, &y, hs, &[(A21, &k1)]);
            f(t + C2 * hs, &tmp, &mut k2);
            combine(&mut tmp, &y, hs, &[(A31, &k1), (A32, &k2)]);
            f(t + C3 * hs, &tmp, &mut k3);
            combine(&mut tmp, &y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            f(t + C4 * hs, &tmp, &mut k4);
            combine(&mut tmp, &y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            f(t + C5 * hs, &tmp, &mut k5);
            combine(&mut tmp, &y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
            f(t + hs, &tmp, &mut k6);
            combine(&mut y_new, &y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
            f(t + hs, &y_new, &mut k7);

            let mut err = 0.0;
            for i in 0..n {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
                let sc = opts.atol + opts.rtol * y[i].modulus().max(y_new[i].modulus());
                let q = e.modulus() / sc;
                err += q * q;
            }
            let err = (err / n.max(1) as f64).sqrt();
            steps += 1;

            if err <= 1.0 {
                t = if last { ts } else { t + hs };
                std::mem::swap(&mut y, &mut y_new);
                post_step(&mut y);
                std::mem::swap(&mut k1, &mut k7);
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || fac < 1.0 {
                    h = (hs * fac).min(opts.h_max);
                }
            } else {
                if !err.is_finite() {
                    h = hs * 0.1;
                } else {
                    h = hs * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                }
                if h <= 1e-14 * t.abs().max(1.0) {
                    return Err(Error::StepSizeUnderflow { time: t, step: h });
                }
            }
        }
        observe(t, &y)?;
    }
    Ok(y)
}

fn initial_step<T, F>(f: &mut F, t: f64, y: &[T], f0: &[T], opts: &OdeOptions) -> f64
where
    T: Element,
    F: FnMut(f64, &[T], &mut [T]),
{
    let n = y.len().max(1) as f64;
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..y.len() {
        let sc = opts.atol + opts.rtol * y[i].modulus();
        d0 += (y[i].modulus() / sc).powi(2);
        d1 += (f0[i].modulus() / sc).powi(2);
    }
    let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<T> = y.iter().zip(f0).map(|(&a, &b)| a + b * h0).collect();
    let mut f1 = vec![T::zero(); y.len()];
    f(t + h0, &y1, &mut f1);
    let mut d2 = 0.0;
    for i in 0..y.len() {
        let sc = opts.atol + opts.rtol * y[i].modulus();
        d2 += ((f1[i] - f0[i]).modulus() / sc).powi(2);
    }
    let d2 = (d2 / n).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(opts.h_max)
}

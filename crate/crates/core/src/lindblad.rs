//! Exact steady states, time evolution and observables of the master equation.
//!
//! The model conserves the parity `exp(i pi (a^dag a + s+ s-))` and photon
//! loss maps equal-parity coherences onto themselves, so the steady state and
//! any evolution started from a parity-diagonal state live in the sector of
//! coherences `rho_ij` with `parity(i) == parity(j)`. Solvers work in that
//! sector; residuals are always measured with the full Liouvillian.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{basis_index, liouvillian, parity, vec_index, FockCutoff, TAIL_LEVELS};
use crate::meanfield;
use crate::model::{canonicalize, ModelParams};
use crate::ode::{integrate, OdeOptions};
use crate::sparse::SparseMatrix;

type C64 = Complex64;

pub const DEFAULT_STEADY_TOL: f64 = 1e-10;
pub const DEFAULT_RTOL: f64 = 1e-8;
pub const DEFAULT_ATOL: f64 = 1e-10;
pub const DEFAULT_CUTOFF: usize = 32;
pub const MAX_CUTOFF: usize = 4096;

/// Density matrix on the truncated qubit ⊗ Fock space, stored column-major
/// (identical to the column-stacked vector).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_max: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    /// Wraps a column-stacked vector without validation.
    pub fn from_vec(n_max: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), 4 * n_max * n_max, "vec length must be (2 n_max)^2");
        Self { n_max, data }
    }

    pub fn from_ket(n_max: usize, ket: &[C64]) -> Self {
        let d = 2 * n_max;
        assert_eq!(ket.len(), d);
        let norm: f64 = ket.iter().map(|v| v.norm_sqr()).sum();
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        for j in 0..d {
            for i in 0..d {
                data[vec_index(i, j, d)] = ket[i] * ket[j].conj() / norm;
            }
        }
        Self { n_max, data }
    }

    pub fn basis_state(n_max: usize, spin_up: bool, n: usize) -> Self {
        let mut ket = vec![C64::new(0.0, 0.0); 2 * n_max];
        ket[basis_index(spin_up, n, n_max)] = C64::new(1.0, 0.0);
        Self::from_ket(n_max, &ket)
    }

    /// Coherent cavity state with amplitude `alpha` (truncated and renormalized).
    pub fn coherent(n_max: usize, alpha: C64, spin_up: bool) -> Self {
        let mut ket = vec![C64::new(0.0, 0.0); 2 * n_max];
        let mut amp = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for n in 0..n_max {
            if n > 0 {
                amp = amp * alpha / (n as f64).sqrt();
            }
            ket[basis_index(spin_up, n, n_max)] = amp;
        }
        Self::from_ket(n_max, &ket)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        2 * self.n_max
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[vec_index(i, j, self.dim())]
    }

    pub fn as_vec(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `max |rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut e: f64 = 0.0;
        for j in 0..d {
            for i in 0..=j {
                e = e.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        e
    }

    pub fn hermitize(&mut self) {
        let dim = self.dim();
        hermitize_full(&mut self.data, dim);
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim();
        let m = Mat::<C64>::from_fn(d, d, |i, j| 0.5 * (self.get(i, j) + self.get(j, i).conj()));
        m.self_adjoint_eigenvalues(Side::Lower)
            .expect("Hermitian eigensolver failed")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Checks unit trace, Hermiticity (1e-10) and positivity (-1e-8).
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidParams(format!("density matrix trace {tr} != 1")));
        }
        let h = self.hermiticity_error();
        if h > 1e-10 {
            return Err(Error::InvalidParams(format!("density matrix not Hermitian ({h:.3e})")));
        }
        let lo = self.min_eigenvalue();
        if lo < -1e-8 {
            return Err(Error::InvalidParams(format!("density matrix has eigenvalue {lo:.3e}")));
        }
        Ok(())
    }
}

fn hermitize_full(data: &mut [C64], d: usize) {
    for j in 0..d {
        for i in 0..j {
            let (a, b) = (vec_index(i, j, d), vec_index(j, i, d));
            let m = 0.5 * (data[a] + data[b].conj());
            data[a] = m;
            data[b] = m.conj();
        }
        let k = vec_index(j, j, d);
        data[k] = C64::new(data[k].re, 0.0);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub n_photon: f64,
    pub sigma_z: f64,
    pub x2: f64,
    pub a_mean: C64,
    pub a2_mean: C64,
    /// `P(n)`, summed over the qubit.
    pub photon_dist: Vec<f64>,
    /// Joint `P(n, up)`.
    pub photon_dist_up: Vec<f64>,
    /// Joint `P(n, down)`.
    pub photon_dist_down: Vec<f64>,
}

pub fn observables(rho: &DensityMatrix) -> Observables {
    let n_max = rho.n_max();
    let up: Vec<f64> = (0..n_max)
        .map(|n| rho.get(basis_index(true, n, n_max), basis_index(true, n, n_max)).re)
        .collect();
    let down: Vec<f64> = (0..n_max)
        .map(|n| rho.get(basis_index(false, n, n_max), basis_index(false, n, n_max)).re)
        .collect();
    let dist: Vec<f64> = up.iter().zip(&down).map(|(u, d)| u + d).collect();
    let n_photon = dist.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
    let sigma_z = up.iter().sum::<f64>() - down.iter().sum::<f64>();

    let mut a_mean = C64::new(0.0, 0.0);
    let mut a2_mean = C64::new(0.0, 0.0);
    for spin_up in [true, false] {
        for n in 1..n_max {
            let hi = basis_index(spin_up, n, n_max);
            a_mean += (n as f64).sqrt() * rho.get(hi, hi - 1);
            if n >= 2 {
                a2_mean += ((n * (n - 1)) as f64).sqrt() * rho.get(hi, hi - 2);
            }
        }
    }
    // Tr(x^2 rho) with the truncated x: the a a^dag diagonal is n + 1 except at the edge.
    let diag: f64 = dist
        .iter()
        .enumerate()
        .map(|(n, p)| p * (n as f64 + if n + 1 < n_max { n as f64 + 1.0 } else { 0.0 }))
        .sum();
    let x2 = 0.5 * (diag + 2.0 * a2_mean.re);
    Observables {
        n_photon,
        sigma_z,
        x2,
        a_mean,
        a2_mean,
        photon_dist: dist,
        photon_dist_up: up,
        photon_dist_down: down,
    }
}

/// Population of the top `TAIL_LEVELS` Fock levels.
pub fn tail_population(rho: &DensityMatrix) -> f64 {
    let n_max = rho.n_max();
    let start = n_max.saturating_sub(TAIL_LEVELS);
    (start..n_max)
        .map(|n| {
            let (u, d) = (basis_index(true, n, n_max), basis_index(false, n, n_max));
            rho.get(u, u).re + rho.get(d, d).re
        })
        .sum()
}

/// Column-stacked indices of the equal-parity coherence sector.
struct Sector {
    full_dim: usize,
    /// Sorted full indices kept.
    keep: Vec<usize>,
    /// Sector position of the Hermitian partner `(j, i)`.
    partner: Vec<usize>,
}

impl Sector {
    fn new(n_max: usize) -> Self {
        let d = 2 * n_max;
        let mut pos = vec![usize::MAX; d * d];
        let mut keep = Vec::with_capacity(d * d / 2);
        for j in 0..d {
            for i in 0..d {
                if parity(i, n_max) == parity(j, n_max) {
                    pos[vec_index(i, j, d)] = keep.len();
                    keep.push(vec_index(i, j, d));
                }
            }
        }
        let partner = keep.iter().map(|&k| pos[vec_index(k / d, k % d, d)]).collect();
        Self {
            full_dim: d,
            keep,
            partner,
        }
    }

    fn diagonal_positions(&self) -> Vec<usize> {
        let d = self.full_dim;
        self.keep
            .iter()
            .enumerate()
            .filter(|(_, &k)| k % d == k / d)
            .map(|(s, _)| s)
            .collect()
    }

    fn embed(&self, x: &[C64]) -> Vec<C64> {
        let mut full = vec![C64::new(0.0, 0.0); self.full_dim * self.full_dim];
        for (s, &k) in self.keep.iter().enumerate() {
            full[k] = x[s];
        }
        full
    }

    fn contains_support_of(&self, full: &[C64]) -> bool {
        let mut inside = vec![false; full.len()];
        for &k in &self.keep {
            inside[k] = true;
        }
        full.iter().zip(&inside).all(|(v, &ins)| ins || *v == C64::new(0.0, 0.0))
    }

    fn restrict(&self, full: &[C64]) -> Vec<C64> {
        self.keep.iter().map(|&k| full[k]).collect()
    }

    fn hermitize(&self, x: &mut [C64]) {
        for s in 0..x.len() {
            let t = self.partner[s];
            if t > s {
                let m = 0.5 * (x[s] + x[t].conj());
                x[s] = m;
                x[t] = m.conj();
            } else if t == s {
                x[s] = C64::new(x[s].re, 0.0);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    pub rho: DensityMatrix,
    pub cutoff_used: usize,
    /// `||L vec(rho)||_inf` with the full Liouvillian.
    pub residual: f64,
    pub tail_population: f64,
}

fn check_steady_preconditions(p: &ModelParams) -> Result<()> {
    p.validate()?;
    if p.kappa <= 0.0 {
        return Err(Error::InvalidParams("steady state requires kappa > 0".into()));
    }
    if p.lambda_minus == 0.0 && p.lambda_plus == 0.0 {
        return Err(Error::NonUniqueSteadyState(
            "both couplings vanish; the spin decouples and keeps its initial population".into(),
        ));
    }
    Ok(())
}

fn lu_solve_with_row(
    ls: &SparseMatrix,
    replace: usize,
    diag: &[usize],
) -> Option<Vec<C64>> {
    let n = ls.nrows();
    let mut trips: Vec<Triplet<usize, usize, C64>> = Vec::with_capacity(ls.nnz() + diag.len());
    let mut own: Vec<(usize, usize, C64)> = Vec::with_capacity(ls.nnz() + diag.len());
    for (r, c, v) in ls.triplets() {
        if r != replace {
            trips.push(Triplet::new(r, c, v));
            own.push((r, c, v));
        }
    }
    for &s in diag {
        trips.push(Triplet::new(replace, s, C64::new(1.0, 0.0)));
        own.push((replace, s, C64::new(1.0, 0.0)));
    }
    let a = SparseColMat::<usize, C64>::try_new_from_triplets(n, n, &trips).ok()?;
    let lu = a.sp_lu().ok()?;
    let mut b = Mat::<C64>::zeros(n, 1);
    b[(replace, 0)] = C64::new(1.0, 0.0);
    let x = lu.solve(&b);
    let mut x: Vec<C64> = (0..n).map(|i| x[(i, 0)]).collect();

    let a_own = SparseMatrix::from_triplets(n, n, own);
    let ax = a_own.matvec(&x);
    let mut r = Mat::<C64>::zeros(n, 1);
    for i in 0..n {
        r[(i, 0)] = -ax[i];
    }
    r[(replace, 0)] += C64::new(1.0, 0.0);
    let dx = lu.solve(&r);
    for (i, xi) in x.iter_mut().enumerate() {
        *xi += dx[(i, 0)];
    }
    x.iter().all(|v| v.re.is_finite() && v.im.is_finite()).then_some(x)
}

/// Steady state at a fixed cutoff; no truncation check.
pub fn solve_steady(p: &ModelParams, n_max: usize, tol: f64) -> Result<SteadyStateResult> {
    check_steady_preconditions(p)?;
    let cut = FockCutoff::new(n_max);
    let l = liouvillian(p, cut);
    let sector = Sector::new(n_max);
    let ls = l.principal_submatrix(&sector.keep);
    let diag = sector.diagonal_positions();
    let candidates = [diag[0], *diag.last().unwrap()];

    let mut best: Option<SteadyStateResult> = None;
    for (attempt, &row) in candidates.iter().enumerate() {
        let Some(x) = lu_solve_with_row(&ls, row, &diag) else {
            continue;
        };
        let mut full = sector.embed(&x);
        hermitize_full(&mut full, cut.dim());
        let tr: C64 = (0..cut.dim()).map(|i| full[vec_index(i, i, cut.dim())]).sum();
        if tr.norm() == 0.0 || !tr.re.is_finite() {
            continue;
        }
        full.iter_mut().for_each(|v| *v /= tr.re);
        let residual = l.matvec(&full).iter().map(|v| v.norm()).fold(0.0, f64::max);
        let rho = DensityMatrix::from_vec(n_max, full);
        let tail = tail_population(&rho);
        let res = SteadyStateResult {
            rho,
            cutoff_used: n_max,
            residual,
            tail_population: tail,
        };
        if residual <= tol {
            return Ok(res);
        }
        if attempt == 0 || best.as_ref().is_some_and(|b| residual < b.residual) {
            best = Some(res);
        }
    }
    match best {
        Some(b) => Err(Error::ResidualTooLarge {
            residual: b.residual,
            tol,
        }),
        None => Err(Error::SingularSystem {
            attempts: candidates.len(),
        }),
    }
}

/// Next cutoff after a tail breach.
pub fn escalate_cutoff(n_max: usize) -> usize {
    ((n_max as f64) * 1.5).ceil() as usize
}

/// Steady state starting at `cut`, escalating the cutoff by 1.5x while the
/// top-level population exceeds `cut.tail_tol`.
pub fn steady_state(p: &ModelParams, cut: FockCutoff, tol: f64) -> Result<SteadyStateResult> {
    let mut n = cut.n_max.min(MAX_CUTOFF);
    loop {
        let res = solve_steady(p, n, tol)?;
        if res.tail_population <= cut.tail_tol {
            return Ok(res);
        }
        if n >= MAX_CUTOFF {
            return Err(Error::CutoffExhausted {
                cutoff: n,
                tail: res.tail_population,
                tail_tol: cut.tail_tol,
            });
        }
        n = escalate_cutoff(n).min(MAX_CUTOFF);
    }
}

/// Starting cutoff: `max(hint, ceil(2 eta |c|^2) + 40)` when a stable
/// superradiant mean-field point exists, else `max(hint, 32)`.
pub fn auto_cutoff(p: &ModelParams, hint: usize) -> FockCutoff {
    let (q, _) = canonicalize(p);
    let c2 = q
        .to_dimensionless()
        .ok()
        .and_then(|d| meanfield::stable_sp_amplitude_sq(&d).map(|c2| (d.eta, c2)));
    let n = match c2 {
        Some((eta, c2)) => hint.max((2.0 * eta * c2).ceil() as usize + 40),
        None => hint.max(DEFAULT_CUTOFF),
    };
    FockCutoff::new(n.min(MAX_CUTOFF))
}

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    pub rtol: f64,
    pub atol: f64,
    pub tail_tol: f64,
    pub h_max: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            rtol: DEFAULT_RTOL,
            atol: DEFAULT_ATOL,
            tail_tol: crate::hilbert::DEFAULT_TAIL_TOL,
            h_max: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvolveSample {
    pub t: f64,
    pub obs: Observables,
}

/// Integrates the master equation from `rho0` and samples observables at
/// the sorted `sample_times` (time in units of `1/omega_c`).
pub fn evolve(
    rho0: &DensityMatrix,
    p: &ModelParams,
    sample_times: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<EvolveSample>> {
    p.validate()?;
    let n_max = rho0.n_max();
    let cut = FockCutoff::new(n_max);
    let l = liouvillian(p, cut);
    let sector = Sector::new(n_max);
    let reduced = sector.contains_support_of(rho0.as_vec());
    let (gen, y0) = if reduced {
        (l.principal_submatrix(&sector.keep), sector.restrict(rho0.as_vec()))
    } else {
        (l, rho0.as_vec().to_vec())
    };
    let to_rho = |y: &[C64]| {
        let full = if reduced { sector.embed(y) } else { y.to_vec() };
        DensityMatrix::from_vec(n_max, full)
    };
    let d = cut.dim();
    let mut out = Vec::with_capacity(sample_times.len());
    let ode = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        h_max: opts.h_max,
        ..OdeOptions::default()
    };
    integrate(
        |_, y: &[C64], dy: &mut [C64]| gen.matvec_into(y, dy),
        0.0,
        y0,
        sample_times,
        &ode,
        |y: &mut [C64]| {
            if reduced {
                sector.hermitize(y)
            } else {
                hermitize_full(y, d)
            }
        },
        |t, y| {
            let rho = to_rho(y);
            let tail = tail_population(&rho);
            if tail > opts.tail_tol {
                return Err(Error::TailBreach {
                    cutoff: n_max,
                    tail,
                    tail_tol: opts.tail_tol,
                    time: t,
                });
            }
            out.push(EvolveSample {
                t,
                obs: observables(&rho),
            });
            Ok(())
        },
    )?;
    Ok(out)
}

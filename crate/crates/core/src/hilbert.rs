//! Truncated qubit ⊗ Fock operators, the Hamiltonian and the Liouvillian.
//!
//! Conventions used by every solver in the crate:
//! * product basis with the qubit factor first: index `q * n_max + n`,
//!   `q = 0` is spin up (`sz = +1`), `q = 1` spin down;
//! * density matrices are vectorized by column stacking,
//!   `vec(rho)[i + D j] = rho[i][j]` with `D = 2 n_max`, so that
//!   `vec(A rho B) = (B^T ⊗ A) vec(rho)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::ModelParams;
use crate::sparse::SparseMatrix;

pub type Operator = SparseMatrix;

pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

/// Number of top Fock levels summed for the truncation check.
pub const TAIL_LEVELS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FockCutoff {
    /// Fock states `0..n_max`.
    pub n_max: usize,
    pub tail_tol: f64,
}

impl FockCutoff {
    pub fn new(n_max: usize) -> Self {
        assert!(n_max >= 1, "n_max must be >= 1");
        Self {
            n_max,
            tail_tol: DEFAULT_TAIL_TOL,
        }
    }

    pub fn with_tail_tol(mut self, tail_tol: f64) -> Self {
        self.tail_tol = tail_tol;
        self
    }

    pub fn dim(&self) -> usize {
        2 * self.n_max
    }
}

#[inline]
pub fn basis_index(spin_up: bool, n: usize, n_max: usize) -> usize {
    if spin_up {
        n
    } else {
        n_max + n
    }
}

/// Column-stacking index of `rho[i][j]`.
#[inline]
pub fn vec_index(i: usize, j: usize, dim: usize) -> usize {
    i + dim * j
}

/// Eigenvalue (0 or 1) of `exp(i pi (a^dag a + s+ s-))` on a basis state.
#[inline]
pub fn parity(index: usize, n_max: usize) -> usize {
    let (q, n) = (index / n_max, index % n_max);
    (n + usize::from(q == 0)) % 2
}

#[derive(Debug, Clone)]
pub struct Operators {
    pub a: Operator,
    pub a_dag: Operator,
    pub sigma_z: Operator,
    pub sigma_plus: Operator,
    pub sigma_minus: Operator,
    pub x: Operator,
    pub p: Operator,
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

pub fn fock_annihilation(n_max: usize) -> Operator {
    SparseMatrix::from_triplets(
        n_max,
        n_max,
        (1..n_max).map(|n| (n - 1, n, re((n as f64).sqrt()))).collect(),
    )
}

pub fn build_operators(cut: FockCutoff) -> Operators {
    let n = cut.n_max;
    let id_f = SparseMatrix::identity(n);
    let id_q = SparseMatrix::identity(2);
    let a_f = fock_annihilation(n);
    let sz_q = SparseMatrix::diagonal(&[re(1.0), re(-1.0)]);
    let sp_q = SparseMatrix::from_triplets(2, 2, vec![(0, 1, re(1.0))]);

    let a = id_q.kron(&a_f);
    let a_dag = a.adjoint();
    let sigma_plus = sp_q.kron(&id_f);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let x = a_dag.add(&a).scale(re(s));
    let p = a_dag.sub(&a).scale(Complex64::new(0.0, s));
    Operators {
        sigma_z: sz_q.kron(&id_f),
        sigma_minus: sigma_plus.adjoint(),
        sigma_plus,
        a,
        a_dag,
        x,
        p,
    }
}

/// `wc a^dag a + (Omega/2) sz - lm (a s+ + a^dag s-) - lp (a s- + a^dag s+)`.
pub fn hamiltonian(p: &ModelParams, cut: FockCutoff) -> Operator {
    let n_max = cut.n_max;
    let d = cut.dim();
    let mut trips = Vec::with_capacity(d + 4 * n_max);
    for spin_up in [true, false] {
        let sz = if spin_up { 1.0 } else { -1.0 };
        for n in 0..n_max {
            let i = basis_index(spin_up, n, n_max);
            trips.push((i, i, re(p.omega_c * n as f64 + 0.5 * p.omega * sz)));
        }
    }
    for n in 1..n_max {
        let g = (n as f64).sqrt();
        // a s+ |down, n> = sqrt(n) |up, n-1>
        let (up_lo, down_hi) = (basis_index(true, n - 1, n_max), basis_index(false, n, n_max));
        trips.push((up_lo, down_hi, re(-p.lambda_minus * g)));
        trips.push((down_hi, up_lo, re(-p.lambda_minus * g)));
        // a s- |up, n> = sqrt(n) |down, n-1>
        let (down_lo, up_hi) = (basis_index(false, n - 1, n_max), basis_index(true, n, n_max));
        trips.push((down_lo, up_hi, re(-p.lambda_plus * g)));
        trips.push((up_hi, down_lo, re(-p.lambda_plus * g)));
    }
    SparseMatrix::from_triplets(d, d, trips)
}

/// Generator of `drho/dt = -i[H, rho] + sum_k g_k (2 L rho L^dag - L^dag L rho - rho L^dag L)`
/// acting on column-stacked `vec(rho)`.
pub fn lindblad_generator(h: &Operator, jumps: &[(f64, &Operator)]) -> SparseMatrix {
    let d = h.nrows();
    let mi = Complex64::new(0.0, -1.0);
    let mut eff = h.scale(mi);
    for &(g, l) in jumps {
        eff = eff.sub(&l.adjoint().matmul(l).scale(re(g)));
    }
    let eff_adj = eff.adjoint();
    let jump_nnz: usize = jumps.iter().map(|(_, l)| l.nnz() * l.nnz()).sum();
    let mut trips = Vec::with_capacity(2 * d * eff.nnz() + jump_nnz);
    // K rho with K = -iH - sum g L^dag L
    for (i, k, v) in eff.triplets() {
        for j in 0..d {
            trips.push((vec_index(i, j, d), vec_index(k, j, d), v));
        }
    }
    // rho K^dag
    for (k, j, v) in eff_adj.triplets() {
        for i in 0..d {
            trips.push((vec_index(i, j, d), vec_index(i, k, d), v));
        }
    }
    for &(g, l) in jumps {
        for (i, k, v1) in l.triplets() {
            for (j, m, v2) in l.triplets() {
                trips.push((vec_index(i, j, d), vec_index(k, m, d), v1 * v2.conj() * (2.0 * g)));
            }
        }
    }
    SparseMatrix::from_triplets(d * d, d * d, trips)
}

/// Liouvillian of the model with photon loss `kappa D[a]`.
pub fn liouvillian(p: &ModelParams, cut: FockCutoff) -> SparseMatrix {
    let h = hamiltonian(p, cut);
    let ops = build_operators(cut);
    lindblad_generator(&h, &[(p.kappa, &ops.a)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn dense(m: &SparseMatrix) -> DMatrix<Complex64> {
        DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m.get(r, c))
    }

    fn params(lm: f64, lp: f64, kappa: f64) -> ModelParams {
        ModelParams::new(1.0, 1.7, lm, lp, kappa)
    }

    #[test]
    fn ladder_and_pauli_algebra() {
        let cut = FockCutoff::new(6);
        let o = build_operators(cut);
        let af = fock_annihilation(6);
        assert_relative_eq!(af.get(1, 2).re, 2f64.sqrt());

        let comm = dense(&o.a.matmul(&o.a_dag)) - dense(&o.a_dag.matmul(&o.a));
        for q in [true, false] {
            for n in 0..5 {
                let i = basis_index(q, n, 6);
                assert_relative_eq!(comm[(i, i)].re, 1.0, epsilon = 1e-14);
            }
        }
        let anti = o.sigma_plus.matmul(&o.sigma_minus).add(&o.sigma_minus.matmul(&o.sigma_plus));
        assert_eq!(dense(&anti), DMatrix::identity(12, 12));

        // sigma_z = [s+, s-]
        let c = o.sigma_plus.matmul(&o.sigma_minus).sub(&o.sigma_minus.matmul(&o.sigma_plus));
        assert_eq!(dense(&c), dense(&o.sigma_z));

        let x2 = dense(&o.x.matmul(&o.x));
        let n = dense(&o.a_dag.matmul(&o.a));
        let a2 = dense(&o.a.matmul(&o.a));
        let ad2 = dense(&o.a_dag.matmul(&o.a_dag));
        let ident = DMatrix::<Complex64>::identity(12, 12);
        let rhs = (ident + n * Complex64::new(2.0, 0.0) + a2 + ad2) * Complex64::new(0.5, 0.0);
        for i in 0..12 {
            if i % 6 < 5 {
                assert_relative_eq!((x2[(i, i)] - rhs[(i, i)]).norm(), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn hamiltonian_is_hermitian_and_decoupled_spectrum() {
        let cut = FockCutoff::new(7);
        let h = hamiltonian(&params(0.3, 0.8, 0.1), cut);
        assert_eq!(h, h.adjoint());

        let h0 = dense(&hamiltonian(&params(0.0, 0.0, 0.0), cut));
        for q in [true, false] {
            for n in 0..7 {
                let i = basis_index(q, n, 7);
                let s = if q { 0.85 } else { -0.85 };
                assert_relative_eq!(h0[(i, i)].re, n as f64 + s);
            }
        }
    }

    #[test]
    fn jaynes_cummings_block() {
        // With lp = 0 the pair {|up,0>, |down,1>} is closed.
        let (wc, om, lm) = (1.0, 1.7, 0.4);
        let h = dense(&hamiltonian(&ModelParams::new(wc, om, lm, 0.0, 0.0), FockCutoff::new(2)));
        let (u0, d1) = (basis_index(true, 0, 2), basis_index(false, 1, 2));
        let m = nalgebra::Matrix2::new(h[(u0, u0)].re, h[(u0, d1)].re, h[(d1, u0)].re, h[(d1, d1)].re);
        let eig = m.symmetric_eigen().eigenvalues;
        let lo = eig.min();
        let expect = wc / 2.0 - ((wc - om).powi(2) / 4.0 + lm * lm).sqrt();
        assert_relative_eq!(lo, expect, epsilon = 1e-12);
    }

    #[test]
    fn isotropic_hamiltonian_conserves_parity() {
        let cut = FockCutoff::new(8);
        let h = hamiltonian(&params(0.9, 0.9, 0.0), cut);
        for (r, c, _) in h.triplets() {
            assert_eq!(parity(r, 8), parity(c, 8));
        }
        let h = hamiltonian(&params(0.9, 0.2, 0.0), cut);
        for (r, c, _) in h.triplets() {
            assert_eq!(parity(r, 8), parity(c, 8));
        }
    }

    #[test]
    fn liouvillian_preserves_trace() {
        let cut = FockCutoff::new(5);
        let l = liouvillian(&params(0.5, 0.2, 0.3), cut);
        let d = cut.dim();
        let mut tr = vec![Complex64::new(0.0, 0.0); d * d];
        for i in 0..d {
            tr[vec_index(i, i, d)] = re(1.0);
        }
        let row = l.vecmat(&tr);
        assert!(row.iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn liouvillian_matches_commutator_form() {
        // Check L vec(rho) against -i[H, rho] + k D[a] rho on a random Hermitian rho.
        let cut = FockCutoff::new(4);
        let p = params(0.7, 0.3, 0.45);
        let d = cut.dim();
        let h = dense(&hamiltonian(&p, cut));
        let a = dense(&build_operators(cut).a);
        let rho = DMatrix::from_fn(d, d, |i, j| {
            let x = ((i * 7 + j * 3) % 11) as f64 / 11.0;
            let y = ((i * 5 + j * 13) % 9) as f64 / 9.0;
            Complex64::new(x + y, if i == j { 0.0 } else { x - y })
        });
        let rho = (&rho + rho.adjoint()) * re(0.5);
        let ad = a.adjoint();
        let mi = Complex64::new(0.0, -1.0);
        let expect = (&h * &rho - &rho * &h) * mi
            + (&a * &rho * &ad * re(2.0) - &ad * &a * &rho - &rho * &ad * &a) * re(p.kappa);
        let v: Vec<Complex64> = (0..d * d).map(|k| rho[(k % d, k / d)]).collect();
        let out = liouvillian(&p, cut).matvec(&v);
        for k in 0..d * d {
            assert_relative_eq!((out[k] - expect[(k % d, k / d)]).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn closed_system_spectrum_is_imaginary() {
        let cut = FockCutoff::new(3);
        let l = dense(&liouvillian(&params(0.6, 0.4, 0.0), cut));
        let (_, t) = l.schur().unpack();
        let max_re = (0..t.nrows()).map(|i| t[(i, i)].re.abs()).fold(0.0, f64::max);
        assert!(max_re < 1e-10);
    }

    #[test]
    fn cavity_coherence_decays_at_kappa() {
        // Omega = lambda = 0: d<a>/dt = -(kappa + i wc) <a>
        let cut = FockCutoff::new(6);
        let p = ModelParams::new(1.0, 0.0, 0.0, 0.0, 0.37);
        let l = dense(&liouvillian(&p, cut));
        let (_, t) = l.schur().unpack();
        let target = Complex64::new(-0.37, 1.0);
        let hit = (0..t.nrows()).any(|i| (t[(i, i)] - target).norm() < 1e-10);
        assert!(hit);
    }

    #[test]
    fn matrix_market_export_round_trips() {
        let cut = FockCutoff::new(3);
        let l = liouvillian(&params(0.6, 0.4, 0.2), cut);
        let mut buf = Vec::new();
        l.write_matrix_market(&mut buf).unwrap();
        let back = SparseMatrix::read_matrix_market(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, l);
    }
}

//! Compressed-sparse-row complex matrices.

use std::io::Write;

use num_complex::Complex64;

pub type C64 = Complex64;

/// Complex CSR matrix. Entries within a row are sorted by column and
/// duplicates are summed on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    pub fn from_triplets(nrows: usize, ncols: usize, mut trips: Vec<(usize, usize, C64)>) -> Self {
        trips.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(trips.len());
        let mut values: Vec<C64> = Vec::with_capacity(trips.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in trips {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut m = Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        };
        m.prune(0.0);
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, C64::new(1.0, 0.0))).collect())
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_triplets(n, n, diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
    }

    /// Drops stored entries with modulus `<= tol`.
    fn prune(&mut self, tol: f64) {
        let mut row_ptr = vec![0usize; self.nrows + 1];
        let mut col_idx = Vec::with_capacity(self.col_idx.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.nrows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if self.values[k].norm() > tol {
                    col_idx.push(self.col_idx[k]);
                    values.push(self.values[k]);
                }
            }
            row_ptr[r + 1] = col_idx.len();
        }
        self.row_ptr = row_ptr;
        self.col_idx = col_idx;
        self.values = values;
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yr = acc;
        }
    }

    /// `x^T A` for a row vector `x`.
    pub fn vecmat(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![C64::new(0.0, 0.0); self.ncols];
        for (r, t) in self.triplets_with_row() {
            y[t.0] += x[r] * t.1;
        }
        y
    }

    fn triplets_with_row(&self) -> impl Iterator<Item = (usize, (usize, C64))> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |e| (r, e)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.triplets().map(|(r, c, v)| (c, r, v)).collect(),
        )
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.triplets().map(|(r, c, v)| (c, r, v.conj())).collect(),
        )
    }

    pub fn conj(&self) -> Self {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v = v.conj());
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= s);
        m.prune(0.0);
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let trips = self.triplets().chain(other.triplets()).collect();
        Self::from_triplets(self.nrows, self.ncols, trips)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut trips = Vec::new();
        let mut acc = vec![C64::new(0.0, 0.0); other.ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; other.ncols];
        for r in 0..self.nrows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !mark[c] {
                        mark[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            for &c in &touched {
                trips.push((r, c, acc[c]));
                acc[c] = C64::new(0.0, 0.0);
                mark[c] = false;
            }
            touched.clear();
        }
        Self::from_triplets(self.nrows, other.ncols, trips)
    }

    /// Kronecker product with `self` as the outer factor.
    pub fn kron(&self, other: &Self) -> Self {
        let mut trips = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.triplets() {
            for (r2, c2, v2) in other.triplets() {
                trips.push((r1 * other.nrows + r2, c1 * other.ncols + c2, v1 * v2));
            }
        }
        Self::from_triplets(self.nrows * other.nrows, self.ncols * other.ncols, trips)
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let mut d = vec![vec![C64::new(0.0, 0.0); self.ncols]; self.nrows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }

    /// Largest entrywise modulus, 0 for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Sub-matrix on the given (sorted, unique) index set, rows and columns alike.
    pub fn principal_submatrix(&self, keep: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.ncols.max(self.nrows)];
        for (new, &old) in keep.iter().enumerate() {
            pos[old] = new;
        }
        let mut trips = Vec::new();
        for (new_r, &r) in keep.iter().enumerate() {
            for (c, v) in self.row(r) {
                if pos[c] != usize::MAX {
                    trips.push((new_r, pos[c], v));
                }
            }
        }
        Self::from_triplets(keep.len(), keep.len(), trips)
    }

    /// Writes a Matrix Market `coordinate complex general` file (1-based indices).
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate complex general")?;
        writeln!(w, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (r, c, v) in self.triplets() {
            writeln!(w, "{} {} {:.17e} {:.17e}", r + 1, c + 1, v.re, v.im)?;
        }
        Ok(())
    }

    pub fn read_matrix_market(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().filter(|l| !l.starts_with('%') && !l.trim().is_empty());
        let header = lines.next().ok_or("missing size line")?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|e| format!("bad size line: {e}")))
            .collect::<Result<_, _>>()?;
        if dims.len() != 3 {
            return Err("size line needs three integers".into());
        }
        let mut trips = Vec::with_capacity(dims[2]);
        for line in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 4 {
                return Err(format!("bad entry line '{line}'"));
            }
            let parse_f = |s: &str| s.parse::<f64>().map_err(|e| e.to_string());
            let parse_u = |s: &str| s.parse::<usize>().map_err(|e| e.to_string());
            trips.push((
                parse_u(t[0])? - 1,
                parse_u(t[1])? - 1,
                C64::new(parse_f(t[2])?, parse_f(t[3])?),
            ));
        }
        Ok(Self::from_triplets(dims[0], dims[1], trips))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn duplicates_are_summed_and_zeros_dropped() {
        let m = SparseMatrix::from_triplets(
            2,
            2,
            vec![(0, 1, c(1.0, 0.0)), (0, 1, c(2.0, 1.0)), (1, 0, c(0.0, 0.0))],
        );
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), c(3.0, 1.0));
        assert_eq!(m.get(1, 0), c(0.0, 0.0));
    }

    #[test]
    fn products_match_dense() {
        let a = SparseMatrix::from_triplets(2, 3, vec![(0, 0, c(1.0, 1.0)), (1, 2, c(2.0, 0.0)), (0, 2, c(0.0, -1.0))]);
        let b = SparseMatrix::from_triplets(3, 2, vec![(0, 1, c(1.0, 0.0)), (2, 0, c(3.0, 0.0)), (2, 1, c(0.0, 1.0))]);
        let p = a.matmul(&b).to_dense();
        assert_eq!(p[0][0], c(0.0, -3.0));
        assert_eq!(p[0][1], c(2.0, 1.0));
        assert_eq!(p[1][0], c(6.0, 0.0));
        assert_eq!(p[1][1], c(0.0, 2.0));

        let k = a.kron(&SparseMatrix::identity(2));
        assert_eq!(k.nrows(), 4);
        assert_eq!(k.get(1, 5), c(0.0, -1.0));
        assert_eq!(a.adjoint().get(2, 0), c(0.0, 1.0));
    }

    #[test]
    fn matrix_market_round_trip() {
        let a = SparseMatrix::from_triplets(3, 3, vec![(0, 0, c(1.5, -0.25)), (2, 1, c(-1e-7, 3.0))]);
        let mut buf = Vec::new();
        a.write_matrix_market(&mut buf).unwrap();
        let b = SparseMatrix::read_matrix_market(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}

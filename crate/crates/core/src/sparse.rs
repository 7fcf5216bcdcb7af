//! Compressed-row complex sparse matrices.
//!
//! Every constructor goes through a sort/merge of coordinate triplets and
//! drops entries with modulus at or below [`DROP_TOL`], so results are
//! deduplicated, row-major sorted and independent of insertion order.

use rayon::prelude::*;

use crate::linalg::{CMatrix, C64, ONE, ZERO};

/// Entries with modulus at or below this are removed after every operation.
pub const DROP_TOL: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![ONE; n])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_triplets(n, n, diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
    }

    /// Sorts, merges duplicates by summation and drops near-zero entries.
    pub fn from_triplets(nrows: usize, ncols: usize, mut trip: Vec<(usize, usize, C64)>) -> Self {
        trip.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut cols = Vec::with_capacity(trip.len());
        let mut vals = Vec::with_capacity(trip.len());
        let mut rows = Vec::with_capacity(trip.len());
        let mut i = 0;
        while i < trip.len() {
            let (r, cidx, mut v) = trip[i];
            assert!(r < nrows && cidx < ncols, "triplet ({r}, {cidx}) out of bounds");
            let mut k = i + 1;
            while k < trip.len() && trip[k].0 == r && trip[k].1 == cidx {
                v += trip[k].2;
                k += 1;
            }
            if v.norm() > DROP_TOL {
                rows.push(r);
                cols.push(cidx);
                vals.push(v);
            }
            i = k;
        }
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            cols,
            vals,
        }
    }

    /// Builds from already-merged per-row entry lists (sorted by column).
    pub(crate) fn from_rows(ncols: usize, rows: Vec<Vec<(usize, C64)>>) -> Self {
        let nrows = rows.len();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        row_ptr.push(0);
        let total: usize = rows.iter().map(Vec::len).sum();
        let mut cols = Vec::with_capacity(total);
        let mut vals = Vec::with_capacity(total);
        for row in rows {
            for (cidx, v) in row {
                cols.push(cidx);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn from_dense(m: &CMatrix) -> Self {
        let mut trip = Vec::new();
        for r in 0..m.nrows() {
            for cidx in 0..m.ncols() {
                let v = m[(r, cidx)];
                if v.norm() > DROP_TOL {
                    trip.push((r, cidx, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), trip)
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.nrows, self.ncols);
        for (r, cidx, v) in self.iter() {
            m[(r, cidx)] += v;
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// Row pointers, column indices and values.
    pub(crate) fn parts(&self) -> (&[usize], &[usize], &[C64]) {
        (&self.row_ptr, &self.cols, &self.vals)
    }

    /// Entries `(col, value)` of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[range.clone()].iter().copied().zip(self.vals[range].iter().copied())
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(cidx, v)| (r, cidx, v)))
    }

    pub fn get(&self, r: usize, cidx: usize) -> C64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&cidx) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => ZERO,
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i)).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |a, v| a.max(v.norm()))
    }

    pub fn scale(&self, s: C64) -> Self {
        let trip = self.iter().map(|(r, cidx, v)| (r, cidx, v * s)).collect();
        Self::from_triplets(self.nrows, self.ncols, trip)
    }

    pub fn adjoint(&self) -> Self {
        let trip = self.iter().map(|(r, cidx, v)| (cidx, r, v.conj())).collect();
        Self::from_triplets(self.ncols, self.nrows, trip)
    }

    pub fn transpose(&self) -> Self {
        let trip = self.iter().map(|(r, cidx, v)| (cidx, r, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, trip)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(ONE, other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-ONE, other)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: C64, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols), "shape mismatch");
        let mut trip: Vec<_> = self.iter().collect();
        trip.extend(other.iter().map(|(r, cidx, v)| (r, cidx, a * v)));
        Self::from_triplets(self.nrows, self.ncols, trip)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.ncols, other.nrows, "inner dimension mismatch");
        let ncols = other.ncols;
        let rows: Vec<Vec<(usize, C64)>> = (0..self.nrows)
            .into_par_iter()
            .map(|r| {
                let mut acc: Vec<(usize, C64)> = Vec::new();
                for (k, a) in self.row(r) {
                    for (cidx, b) in other.row(k) {
                        acc.push((cidx, a * b));
                    }
                }
                merge_row(acc)
            })
            .collect();
        Self::from_rows(ncols, rows)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// Kronecker product with `self` as the slow (most significant) index.
    pub fn kron(&self, other: &Self) -> Self {
        let mut trip = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.iter() {
            for (r2, c2, v2) in other.iter() {
                trip.push((r1 * other.nrows + r2, c1 * other.ncols + c2, v1 * v2));
            }
        }
        Self::from_triplets(self.nrows * other.nrows, self.ncols * other.ncols, trip)
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.ncols, "vector length mismatch");
        (0..self.nrows)
            .into_par_iter()
            .with_min_len(256)
            .map(|r| self.row(r).fold(ZERO, |acc, (cidx, a)| acc + a * v[cidx]))
            .collect()
    }

    /// Largest entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.sub(other).max_abs()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }
}

/// Sorts one row's `(col, value)` pairs, merging duplicates and dropping zeros.
pub(crate) fn merge_row(mut acc: Vec<(usize, C64)>) -> Vec<(usize, C64)> {
    acc.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, C64)> = Vec::with_capacity(acc.len());
    for (cidx, v) in acc {
        match out.last_mut() {
            Some(last) if last.0 == cidx => last.1 += v,
            _ => out.push((cidx, v)),
        }
    }
    out.retain(|e| e.1.norm() > DROP_TOL);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff, real};

    fn sample() -> SparseMatrix {
        SparseMatrix::from_triplets(
            3,
            3,
            vec![(0, 1, c(1.0, 2.0)), (2, 2, real(3.0)), (0, 1, real(-1.0)), (1, 0, real(1e-16))],
        )
    }

    #[test]
    fn triplets_merge_and_drop() {
        let m = sample();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), c(0.0, 2.0));
        assert_eq!(m.get(1, 0), ZERO);
    }

    #[test]
    fn products_match_dense() {
        let a = sample();
        let b = SparseMatrix::from_triplets(3, 2, vec![(1, 0, real(2.0)), (2, 1, c(0.0, 1.0))]);
        let d = a.to_dense() * b.to_dense();
        assert!(max_abs_diff(&a.matmul(&b).to_dense(), &d) < 1e-15);
        let k = a.kron(&b);
        assert!(max_abs_diff(&k.to_dense(), &a.to_dense().kronecker(&b.to_dense())) < 1e-15);
        assert!(max_abs_diff(&a.adjoint().to_dense(), &a.to_dense().adjoint()) < 1e-15);
    }

    #[test]
    fn matvec_matches_dense() {
        let a = sample();
        let v = vec![real(1.0), c(0.5, -1.0), real(2.0)];
        let w = a.matvec(&v);
        let dv = a.to_dense() * nalgebra::DVector::from_vec(v);
        for (x, y) in w.iter().zip(dv.iter()) {
            assert!((x - y).norm() < 1e-15);
        }
    }
}

use rayon::prelude::*;

use super::GlobalBasis;
use crate::linalg::{C64, ONE, ZERO};
use crate::sparse::{merge_row, SparseMatrix};

/// Chunk length for reductions; fixed so sums do not depend on the thread count.
const REDUCE_CHUNK: usize = 4096;
const MIN_ROWS_PER_TASK: usize = 512;
const APPLY_CHUNK: usize = 2048;

/// Anything that can multiply a vector.
pub trait LinearMap: Sync {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[C64]) -> Vec<C64>;

    /// Writes the product into `y`, reusing its storage.
    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        y.copy_from_slice(&self.apply(x));
    }
}

impl LinearMap for SparseMatrix {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.matvec(x)
    }
}

/// `<a|b>`, summed in fixed chunks.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len());
    let partial: Vec<C64> = a
        .par_chunks(REDUCE_CHUNK)
        .zip(b.par_chunks(REDUCE_CHUNK))
        .map(|(x, y)| x.iter().zip(y).fold(ZERO, |acc, (p, q)| acc + p.conj() * q))
        .collect();
    partial.into_iter().fold(ZERO, |acc, z| acc + z)
}

pub fn norm(a: &[C64]) -> f64 {
    dot(a, a).re.max(0.0).sqrt()
}

/// An operator acting on a few tensor factors, times optional fermionic
/// parity strings `(-1)^n` on further (vertex) factors.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalTerm {
    pub support: Vec<usize>,
    /// Matrix over the support factors, first support factor slowest.
    pub matrix: SparseMatrix,
    pub strings: Vec<usize>,
    /// Global index offset of every local basis state.
    offsets: Vec<usize>,
    local_strides: Vec<usize>,
    /// The matrix with columns replaced by global offsets.
    row_ptr: Vec<usize>,
    col_offsets: Vec<usize>,
    vals: Vec<C64>,
}

impl LocalTerm {
    pub fn new(basis: &GlobalBasis, support: Vec<usize>, matrix: SparseMatrix, strings: Vec<usize>) -> Self {
        let local = GlobalBasis::new(support.iter().map(|&f| basis.dims[f]).collect());
        assert_eq!(matrix.nrows(), local.dim, "local matrix does not match its support");
        assert!(strings.iter().all(|s| !support.contains(s)), "string overlaps support");
        let offsets = (0..local.dim)
            .map(|li| {
                support
                    .iter()
                    .enumerate()
                    .map(|(k, &f)| local.digit(li, k) * basis.strides[f])
                    .sum()
            })
            .collect::<Vec<usize>>();
        let (row_ptr, cols, vals) = matrix.parts();
        let (row_ptr, vals) = (row_ptr.to_vec(), vals.to_vec());
        let col_offsets = cols.iter().map(|&lc| offsets[lc]).collect();
        Self {
            support,
            matrix,
            strings,
            offsets,
            local_strides: local.strides,
            row_ptr,
            col_offsets,
            vals,
        }
    }

    #[inline]
    fn local_row(&self, basis: &GlobalBasis, r: usize) -> usize {
        self.support
            .iter()
            .zip(&self.local_strides)
            .map(|(&f, s)| basis.digit(r, f) * s)
            .sum()
    }

    #[inline]
    fn sign(&self, basis: &GlobalBasis, r: usize) -> f64 {
        let odd = self
            .strings
            .iter()
            .fold(0, |acc, &f| acc + basis.digit(r, f).count_ones());
        if odd % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn row_entries(&self, basis: &GlobalBasis, r: usize, out: &mut Vec<(usize, C64)>) {
        let lr = self.local_row(basis, r);
        let base = r - self.offsets[lr];
        let sign = self.sign(basis, r);
        out.extend(self.matrix.row(lr).map(|(lc, v)| (base + self.offsets[lc], v * sign)));
    }

    /// Row `r` of the embedded term times `x`, given the digits of `r`.
    #[inline]
    fn row_dot(&self, digits: &[usize], r: usize, x: &[C64]) -> C64 {
        let lr: usize = self
            .support
            .iter()
            .zip(&self.local_strides)
            .map(|(&f, s)| digits[f] * s)
            .sum();
        let base = r - self.offsets[lr];
        let range = self.row_ptr[lr]..self.row_ptr[lr + 1];
        let acc = self.col_offsets[range.clone()]
            .iter()
            .zip(&self.vals[range])
            .fold(ZERO, |acc, (&off, v)| acc + v * x[base + off]);
        let odd = self.strings.iter().fold(0, |acc, &f| acc + digits[f].count_ones());
        if odd % 2 == 0 {
            acc
        } else {
            -acc
        }
    }

    pub fn adjoint(&self, basis: &GlobalBasis) -> Self {
        Self::new(basis, self.support.clone(), self.matrix.adjoint(), self.strings.clone())
    }
}

/// A sum of local terms over one global basis, applied without assembling.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSum {
    pub basis: GlobalBasis,
    pub terms: Vec<LocalTerm>,
}

impl OperatorSum {
    pub fn new(basis: GlobalBasis) -> Self {
        Self {
            basis,
            terms: Vec::new(),
        }
    }

    pub fn identity(basis: GlobalBasis) -> Self {
        let mut s = Self::new(basis);
        let t = LocalTerm::new(&s.basis, Vec::new(), SparseMatrix::identity(1), Vec::new());
        s.terms.push(t);
        s
    }

    pub fn single(basis: GlobalBasis, support: Vec<usize>, matrix: SparseMatrix, strings: Vec<usize>) -> Self {
        let mut s = Self::new(basis);
        s.push(support, matrix, strings);
        s
    }

    pub fn push(&mut self, support: Vec<usize>, matrix: SparseMatrix, strings: Vec<usize>) {
        let t = LocalTerm::new(&self.basis, support, matrix, strings);
        self.terms.push(t);
    }

    pub fn extend(&mut self, other: OperatorSum) {
        assert_eq!(self.basis, other.basis, "operators live on different bases");
        self.terms.extend(other.terms);
    }

    pub fn scale(&self, s: C64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| LocalTerm::new(&self.basis, t.support.clone(), t.matrix.scale(s), t.strings.clone()))
            .collect();
        Self {
            basis: self.basis.clone(),
            terms,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            basis: self.basis.clone(),
            terms: self.terms.iter().map(|t| t.adjoint(&self.basis)).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Full sparse matrix; rows are merged independently, so the result does
    /// not depend on the thread count.
    pub fn assemble(&self) -> SparseMatrix {
        let rows: Vec<Vec<(usize, C64)>> = (0..self.basis.dim)
            .into_par_iter()
            .with_min_len(MIN_ROWS_PER_TASK)
            .map(|r| {
                let mut acc = Vec::new();
                for t in &self.terms {
                    t.row_entries(&self.basis, r, &mut acc);
                }
                merge_row(acc)
            })
            .collect();
        SparseMatrix::from_rows(self.basis.dim, rows)
    }

    /// Matrix element `<r|O|c>`.
    pub fn entry(&self, r: usize, c: usize) -> C64 {
        let mut acc = Vec::new();
        for t in &self.terms {
            t.row_entries(&self.basis, r, &mut acc);
        }
        acc.into_iter().filter(|e| e.0 == c).fold(ZERO, |a, e| a + e.1)
    }
}

impl OperatorSum {
    fn rows_into(terms: &[&LocalTerm], basis: &GlobalBasis, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), basis.dim, "vector length mismatch");
        assert_eq!(y.len(), basis.dim, "vector length mismatch");
        let dims = &basis.dims;
        y.par_chunks_mut(APPLY_CHUNK).enumerate().for_each(|(ci, out)| {
            let r0 = ci * APPLY_CHUNK;
            let mut digits = basis.decode(r0);
            for (k, slot) in out.iter_mut().enumerate() {
                let r = r0 + k;
                *slot = terms.iter().fold(ZERO, |acc, t| acc + t.row_dot(&digits, r, x));
                for f in (0..digits.len()).rev() {
                    digits[f] += 1;
                    if digits[f] < dims[f] {
                        break;
                    }
                    digits[f] = 0;
                }
            }
        });
    }

    /// Applies several sums over the same basis as one operator.
    pub fn apply_sum_into(parts: &[&OperatorSum], x: &[C64], y: &mut [C64]) {
        let terms: Vec<&LocalTerm> = parts.iter().flat_map(|p| p.terms.iter()).collect();
        Self::rows_into(&terms, &parts[0].basis, x, y);
    }
}

impl LinearMap for OperatorSum {
    fn dim(&self) -> usize {
        self.basis.dim
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; self.basis.dim];
        self.apply_into(x, &mut y);
        y
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        let terms: Vec<&LocalTerm> = self.terms.iter().collect();
        Self::rows_into(&terms, &self.basis, x, y);
    }
}

/// Applies maps right to left: `product(&[a, b]).apply(x) = a (b x)`.
pub struct Product<'a>(pub Vec<&'a dyn LinearMap>);

impl LinearMap for Product<'_> {
    fn dim(&self) -> usize {
        self.0[0].dim()
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.0.iter().rev().fold(x.to_vec(), |v, m| m.apply(&v))
    }
}

/// Unit vector `|i>`.
pub fn basis_vector(dim: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[i] = ONE;
    v
}

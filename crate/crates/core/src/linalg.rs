//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `max |U^dagger U - 1|`; for a tall matrix this measures orthonormal columns.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.ncols();
    max_abs_diff(&(u.adjoint() * u), &identity(n))
}

pub fn hermiticity_residual(h: &CMatrix) -> f64 {
    max_abs_diff(h, &h.adjoint())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `exp(i H)` for Hermitian `H`, through its spectral decomposition.
pub fn exp_i_hermitian(h: &CMatrix) -> CMatrix {
    let n = h.nrows();
    if n == 0 {
        return h.clone();
    }
    // symmetrize so the eigensolver sees an exactly Hermitian input
    let hs = (h + h.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(hs);
    let v = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&eig.eigenvalues.map(|x| C64::from_polar(1.0, x)));
    v * phases * v.adjoint()
}

/// Hermitian `q` with `exp(i q) = u` for unitary `u`, using the principal
/// branch of the logarithm (eigenphases in `(-pi, pi]`).
pub fn log_unitary(u: &CMatrix) -> CMatrix {
    let n = u.nrows();
    let schur = nalgebra::Schur::new(u.clone());
    let (q, t) = schur.unpack();
    let mut d = CMatrix::zeros(n, n);
    for i in 0..n {
        let lam = t[(i, i)];
        d[(i, i)] = real(lam.arg());
    }
    let out = &q * d * q.adjoint();
    (&out + out.adjoint()).scale(0.5)
}

/// Columns of an orthonormal basis for the range of a Hermitian projector,
/// by Gram-Schmidt over its columns until the trace is reached.
pub fn projector_range(p: &CMatrix, tol: f64) -> CMatrix {
    let n = p.nrows();
    let rank = p.trace().re.round().max(0.0) as usize;
    let mut basis: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(rank);
    for j in 0..n {
        if basis.len() == rank {
            break;
        }
        let mut v = p.column(j).into_owned();
        for _ in 0..2 {
            for b in &basis {
                let overlap = b.dotc(&v);
                v.axpy(-overlap, b, ONE);
            }
        }
        let norm = v.norm();
        if norm > tol.sqrt() {
            basis.push(v.unscale(norm));
        }
    }
    if basis.is_empty() {
        return CMatrix::zeros(n, 0);
    }
    CMatrix::from_columns(&basis)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let eig = SymmetricEigen::new((h + h.adjoint()).scale(0.5));
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Numerical rank of a matrix by singular values above `tol`.
pub fn rank(m: &CMatrix, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let svd = m.clone().svd(false, false);
    svd.singular_values.iter().filter(|&&s| s > tol).count()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_and_log_are_inverse_on_unitaries() {
        let h = CMatrix::from_row_slice(2, 2, &[real(0.3), c(0.1, -0.2), c(0.1, 0.2), real(-0.7)]);
        let u = exp_i_hermitian(&h);
        assert!(unitarity_residual(&u) < 1e-13);
        let q = log_unitary(&u);
        assert!(max_abs_diff(&q, &h) < 1e-12);
    }

    #[test]
    fn log_of_reflection_reexponentiates() {
        let u = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
        let q = log_unitary(&u);
        assert!(max_abs_diff(&exp_i_hermitian(&q), &u) < 1e-13);
    }

    #[test]
    fn projector_range_dimension() {
        let p = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![ONE, ZERO, ONE]));
        assert_eq!(projector_range(&p, 1e-8).ncols(), 2);
        assert_eq!(rank(&p, 1e-10), 2);
    }
}

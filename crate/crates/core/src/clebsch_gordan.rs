//! Tensor-product decompositions `J x j` and their Clebsch-Gordan coefficients.
//!
//! Coefficients are stored as `C[M, m, N] = <J M; j m | K N>`, so that the
//! columns of the `(dim J * dim j) x dim K` matrix `C` satisfy
//! `(D^J(g) x D^j(g)) C = C D^K(g)`.
//!
//! Phase convention: for each `K`, the first nonzero coefficient in
//! lexicographic `(M, m, N)` order is real and positive.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{format_spin, GroupCatalogEntry, GroupElement, GroupKind, IrrepKind, LieGroup};
use crate::linalg::{exp_i_hermitian, max_abs_diff, real, unitarity_residual, CMatrix, C64, ZERO};

/// Random elements used to check Lie-group intertwiners.
pub const LIE_CHECK_SAMPLES: usize = 50;
pub const LIE_CHECK_SEED: u64 = 0xc6;

const ZERO_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionTerm {
    pub label: String,
    /// Catalog index, or `None` when the irrep lies above a Lie truncation.
    pub irrep: Option<usize>,
    pub dim: usize,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductDecomposition {
    pub j1: usize,
    pub j2: usize,
    pub terms: Vec<DecompositionTerm>,
}

impl ProductDecomposition {
    pub fn multiplicity(&self, k: usize) -> usize {
        self.terms
            .iter()
            .find(|t| t.irrep == Some(k))
            .map_or(0, |t| t.multiplicity)
    }

    /// `sum_K multiplicity(K) dim(K)`, including channels outside a truncation.
    pub fn total_dim(&self) -> usize {
        self.terms.iter().map(|t| t.multiplicity * t.dim).sum()
    }

    /// Channels dropped by a truncation.
    pub fn dropped(&self) -> impl Iterator<Item = &DecompositionTerm> {
        self.terms.iter().filter(|t| t.irrep.is_none() && t.multiplicity > 0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CgTensor {
    pub j1: usize,
    pub j2: usize,
    pub k: usize,
    pub dims: (usize, usize, usize),
    /// Rows `(M, m)` with `M` the slow index, one column per `N`.
    pub coeffs: CMatrix,
}

impl CgTensor {
    pub fn get(&self, big_m: usize, m: usize, n: usize) -> C64 {
        self.coeffs[(big_m * self.dims.1 + m, n)]
    }

    /// `max |C^dagger C - 1|`.
    pub fn orthonormality_residual(&self) -> f64 {
        unitarity_residual(&self.coeffs)
    }
}

pub fn decompose(entry: &GroupCatalogEntry, j1: usize, j2: usize) -> ProductDecomposition {
    let terms = match &entry.group {
        GroupKind::Finite(g) => {
            let n = g.order as f64;
            let chars: Vec<Vec<C64>> = entry
                .irreps
                .iter()
                .map(|r| r.matrices.iter().map(|m| m.trace()).collect())
                .collect();
            entry
                .irreps
                .iter()
                .enumerate()
                .map(|(k, r)| {
                    let s: C64 = (0..g.order)
                        .map(|x| chars[k][x].conj() * chars[j1][x] * chars[j2][x])
                        .sum::<C64>()
                        / n;
                    DecompositionTerm {
                        label: r.label.clone(),
                        irrep: Some(k),
                        dim: r.dim,
                        multiplicity: s.re.round().max(0.0) as usize,
                    }
                })
                .filter(|t| t.multiplicity > 0)
                .collect()
        }
        GroupKind::Lie(LieGroup::Su2 { .. }) => {
            let (a, b) = (twice_spin(entry, j1), twice_spin(entry, j2));
            let lo = a.abs_diff(b);
            (lo..=a + b)
                .step_by(2)
                .map(|tk| DecompositionTerm {
                    label: format_spin(tk),
                    irrep: entry.irreps.iter().position(|r| r.kind == IrrepKind::Spin { twice_j: tk }),
                    dim: tk as usize + 1,
                    multiplicity: 1,
                })
                .collect()
        }
        GroupKind::Lie(LieGroup::U1 { .. }) => {
            let p = charge(entry, j1) + charge(entry, j2);
            vec![DecompositionTerm {
                label: p.to_string(),
                irrep: entry.irreps.iter().position(|r| r.kind == IrrepKind::Charge { p }),
                dim: 1,
                multiplicity: 1,
            }]
        }
    };
    ProductDecomposition { j1, j2, terms }
}

fn twice_spin(entry: &GroupCatalogEntry, j: usize) -> u32 {
    match entry.irreps[j].kind {
        IrrepKind::Spin { twice_j } => twice_j,
        _ => panic!("irrep {j} is not an SU(2) spin"),
    }
}

fn charge(entry: &GroupCatalogEntry, j: usize) -> i32 {
    match entry.irreps[j].kind {
        IrrepKind::Charge { p } => p,
        _ => panic!("irrep {j} is not a U(1) charge"),
    }
}

fn channel_error(entry: &GroupCatalogEntry, j1: usize, j2: usize, k: usize, multiplicity: usize) -> Error {
    let (j1, j2, k) = (
        entry.irreps[j1].label.clone(),
        entry.irreps[j2].label.clone(),
        entry.irreps[k].label.clone(),
    );
    if multiplicity == 0 {
        Error::MissingChannel { j1, j2, k }
    } else {
        Error::Multiplicity { j1, j2, k, multiplicity }
    }
}

/// Clebsch-Gordan tensor for `J x j -> K`.
///
/// Finite groups use the projection algorithm, SU(2) coupling to spin 1/2
/// uses the closed form, other SU(2) couplings fall back to
/// [`su2_cg_numeric`], and U(1) is the trivial 1x1 tensor.
pub fn cg(entry: &GroupCatalogEntry, j1: usize, j2: usize, k: usize) -> Result<CgTensor> {
    let mult = decompose(entry, j1, j2).multiplicity(k);
    if mult != 1 {
        return Err(channel_error(entry, j1, j2, k, mult));
    }
    match &entry.group {
        GroupKind::Finite(_) => finite_cg(entry, j1, j2, k),
        GroupKind::Lie(LieGroup::Su2 { .. }) if twice_spin(entry, j2) == 1 => Ok(su2_cg_half(entry, j1, j2, k)),
        GroupKind::Lie(LieGroup::Su2 { .. }) => su2_cg_numeric(entry, j1, j2, k),
        GroupKind::Lie(LieGroup::U1 { .. }) => Ok(CgTensor {
            j1,
            j2,
            k,
            dims: (1, 1, 1),
            coeffs: CMatrix::from_element(1, 1, real(1.0)),
        }),
    }
}

fn fix_phase(c: &mut CMatrix) {
    // row-major scan of (M, m) x N is lexicographic (M, m, N)
    let first = (0..c.nrows())
        .flat_map(|r| (0..c.ncols()).map(move |n| (r, n)))
        .map(|idx| c[idx])
        .find(|z| z.norm() > ZERO_TOL);
    if let Some(z) = first {
        let phase = z.conj() / z.norm();
        c.iter_mut().for_each(|x| {
            *x *= phase;
            x.re = snap(x.re);
            x.im = snap(x.im);
        });
    }
}

/// Rounds values within roundoff of 0 or +-1.
fn snap(v: f64) -> f64 {
    let r = v.round();
    if r.abs() <= 1.0 && (v - r).abs() < 1e-14 {
        r
    } else {
        v
    }
}

/// Projects a seed vector with `P^K_{N,0}` for every `N` and normalizes.
///
/// `samples` holds `(weight, D^J (x) D^j, D^K)` for a quadrature or a full
/// sum over a finite group; weights sum to one.
fn project(dims: (usize, usize, usize), samples: &[(f64, CMatrix, CMatrix)]) -> Option<CMatrix> {
    let (dj1, dj2, dk) = dims;
    let rows = dj1 * dj2;
    // A_N = dK * avg conj(D^K_{N0}) (D^J x D^j)
    let mut ops = vec![CMatrix::zeros(rows, rows); dk];
    for (w, prod, dkm) in samples {
        for (nn, op) in ops.iter_mut().enumerate() {
            *op += prod * (dkm[(nn, 0)].conj() * (w * dk as f64));
        }
    }
    let seed = (0..rows).find(|&s| ops[0].column(s).norm() > 1e-6)?;
    let norm = ops[0].column(seed).norm();
    let mut c = CMatrix::zeros(rows, dk);
    for (nn, op) in ops.iter().enumerate() {
        c.set_column(nn, &(op.column(seed) / real(norm)));
    }
    Some(c)
}

fn finite_cg(entry: &GroupCatalogEntry, j1: usize, j2: usize, k: usize) -> Result<CgTensor> {
    let g = entry.require_finite("finite_cg")?;
    let dims = (entry.irreps[j1].dim, entry.irreps[j2].dim, entry.irreps[k].dim);
    let w = 1.0 / g.order as f64;
    let mats: Vec<(f64, CMatrix, CMatrix)> = (0..g.order)
        .map(|x| {
            let prod = entry.irreps[j1].matrices[x].kronecker(&entry.irreps[j2].matrices[x]);
            (w, prod, entry.irreps[k].matrices[x].clone())
        })
        .collect();
    let mut c = project(dims, &mats).ok_or_else(|| channel_error(entry, j1, j2, k, 0))?;
    fix_phase(&mut c);
    Ok(CgTensor { j1, j2, k, dims, coeffs: c })
}

/// `<J M; 1/2 m | K N>` in closed form; `m` indices run from `+j` down.
fn su2_cg_half(entry: &GroupCatalogEntry, j1: usize, j2: usize, k: usize) -> CgTensor {
    let (ta, tk) = (twice_spin(entry, j1), twice_spin(entry, k));
    let big_j = ta as f64 / 2.0;
    let (dj1, dk) = (ta as usize + 1, tk as usize + 1);
    let mut c = CMatrix::zeros(dj1 * 2, dk);
    let kk = tk as f64 / 2.0;
    for bi in 0..dj1 {
        let big_m = big_j - bi as f64;
        for mi in 0..2 {
            let m = 0.5 - mi as f64;
            let nval = big_m + m;
            if nval.abs() > kk {
                continue;
            }
            let ni = (kk - nval).round() as usize;
            let v = if tk > ta {
                ((big_j + 2.0 * m * big_m + 1.0) / (2.0 * big_j + 1.0)).sqrt()
            } else {
                -2.0 * m * ((big_j - 2.0 * m * big_m) / (2.0 * big_j + 1.0)).sqrt()
            };
            c[(bi * 2 + mi, ni)] = real(v);
        }
    }
    CgTensor {
        j1,
        j2,
        k,
        dims: (dj1, 2, dk),
        coeffs: c,
    }
}

/// `D^j(a, b, c) = exp(-i a T_z) exp(-i b T_y) exp(-i c T_z)`.
fn wigner_d(entry: &GroupCatalogEntry, j: usize, a: f64, b: f64, c: f64) -> CMatrix {
    let t = &entry.irreps[j].generators;
    let rz = |angle: f64| {
        CMatrix::from_diagonal(&t[2].diagonal().map(|m| C64::from_polar(1.0, -angle * m.re)))
    };
    rz(a) * exp_i_hermitian(&t[1].scale(-b)) * rz(c)
}

/// SU(2) Clebsch-Gordan tensor by projection with an exact Haar quadrature
/// over Euler angles (uniform in the two azimuths, Gauss-Legendre in `cos b`).
pub fn su2_cg_numeric(entry: &GroupCatalogEntry, j1: usize, j2: usize, k: usize) -> Result<CgTensor> {
    let (ta, tb, tk) = (twice_spin(entry, j1), twice_spin(entry, j2), twice_spin(entry, k));
    let dims = (ta as usize + 1, tb as usize + 1, tk as usize + 1);
    let degree = (ta + tb + tk) as usize;
    let n_az = degree + 2;
    let (nodes, weights) = gauss_legendre(degree / 2 + 2);
    let mut pts = Vec::new();
    for ia in 0..n_az {
        let a = 2.0 * PI * ia as f64 / n_az as f64;
        for (x, wx) in nodes.iter().zip(&weights) {
            let b = x.acos();
            for ic in 0..n_az {
                let c = 2.0 * PI * ic as f64 / n_az as f64;
                let w = wx / 2.0 / (n_az * n_az) as f64;
                let prod = wigner_d(entry, j1, a, b, c).kronecker(&wigner_d(entry, j2, a, b, c));
                pts.push((w, prod, wigner_d(entry, k, a, b, c)));
            }
        }
    }
    let mut c = project(dims, &pts).ok_or_else(|| channel_error(entry, j1, j2, k, 0))?;
    fix_phase(&mut c);
    Ok(CgTensor { j1, j2, k, dims, coeffs: c })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, `n >= 2`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for l in 2..=n {
                let p2 = ((2 * l - 1) as f64 * x * p1 - (l - 1) as f64 * p0) / l as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// Largest intertwiner residual `|(D^J x D^j) C - C D^K|` over all elements
/// of a finite group or [`LIE_CHECK_SAMPLES`] seeded random Lie elements.
pub fn verify_cg(entry: &GroupCatalogEntry, t: &CgTensor) -> f64 {
    let elements = match &entry.group {
        GroupKind::Finite(_) => entry.elements(),
        GroupKind::Lie(_) => {
            let mut rng = ChaCha8Rng::seed_from_u64(LIE_CHECK_SEED);
            (0..LIE_CHECK_SAMPLES).map(|_| entry.random_element(&mut rng)).collect()
        }
    };
    elements
        .iter()
        .map(|g: &GroupElement| {
            let lhs = entry.rep_matrix(t.j1, g).kronecker(&entry.rep_matrix(t.j2, g)) * &t.coeffs;
            let rhs = &t.coeffs * entry.rep_matrix(t.k, g);
            max_abs_diff(&lhs, &rhs)
        })
        .fold(0.0, f64::max)
}

/// Columns of every included channel of `J x j`, side by side.
pub fn stacked(entry: &GroupCatalogEntry, j1: usize, j2: usize) -> Result<CMatrix> {
    let dec = decompose(entry, j1, j2);
    let rows = entry.irreps[j1].dim * entry.irreps[j2].dim;
    let mut cols: Vec<CMatrix> = Vec::new();
    for t in &dec.terms {
        if let Some(k) = t.irrep {
            cols.push(cg(entry, j1, j2, k)?.coeffs);
        }
    }
    let total: usize = cols.iter().map(|c| c.ncols()).sum();
    let mut out = CMatrix::from_element(rows, total, ZERO);
    let mut at = 0;
    for c in cols {
        out.view_mut((0, at), (rows, c.ncols())).copy_from(&c);
        at += c.ncols();
    }
    Ok(out)
}

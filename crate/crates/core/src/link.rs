//! The single-link Hilbert space and its operators.
//!
//! A link holds exactly one particle, so its Hilbert space is spanned by the
//! representation states `|j m n>` (canonical order, see [`crate::group`]),
//! or, for finite groups, equivalently by the group states `|g>`. The two
//! bases are related by `|g> = sum F[g][(j,m,n)] |j m n>`, with `F` the
//! Fourier matrix, so an operator changes basis as `O_group = F O_rep F^dagger`.

use serde::{Deserialize, Serialize};

use crate::clebsch_gordan::{cg, decompose};
use crate::error::{Error, Result};
use crate::group::{GroupCatalogEntry, GroupElement, GroupKind, IrrepKind, LieGroup, RepState};
use crate::linalg::{real, CMatrix, C64, ONE};
use crate::sparse::SparseMatrix;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    #[default]
    Rep,
    Group,
}

impl std::fmt::Display for Basis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Basis::Rep => "rep",
            Basis::Group => "group",
        })
    }
}

impl std::str::FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rep" | "representation" => Ok(Basis::Rep),
            "group" | "element" => Ok(Basis::Group),
            other => Err(Error::Parse(format!("unknown basis `{other}` (expected rep or group)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A link operator tagged with the basis its matrix is written in.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkOperator {
    pub basis: Basis,
    pub matrix: SparseMatrix,
}

impl LinkOperator {
    pub fn new(basis: Basis, matrix: SparseMatrix) -> Self {
        Self { basis, matrix }
    }

    fn same_basis(&self, other: &Self) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch {
                expected: self.basis.to_string(),
                found: other.basis.to_string(),
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        Ok(Self::new(self.basis, self.matrix.matmul(&other.matrix)))
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        Ok(Self::new(self.basis, self.matrix.add(&other.matrix)))
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        Ok(Self::new(self.basis, self.matrix.sub(&other.matrix)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.basis, self.matrix.scale(s))
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.basis, self.matrix.adjoint())
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_basis(other)?;
        Ok(self.matrix.max_abs_diff(&other.matrix))
    }
}

/// A `dim(j) x dim(j)` matrix of link operators.
#[derive(Clone, Debug, PartialEq)]
pub struct UMatrix {
    pub irrep: usize,
    pub ops: Vec<Vec<LinkOperator>>,
    /// `(J, K)` label pairs removed by the truncation.
    pub dropped: Vec<(String, String)>,
}

impl UMatrix {
    pub fn dim(&self) -> usize {
        self.ops.len()
    }

    pub fn get(&self, m: usize, n: usize) -> &LinkOperator {
        &self.ops[m][n]
    }

    pub fn basis(&self) -> Basis {
        self.ops[0][0].basis
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkSpace {
    pub catalog: GroupCatalogEntry,
    pub states: Vec<RepState>,
    /// Present for finite groups with a complete irrep set.
    pub fourier: Option<CMatrix>,
}

impl LinkSpace {
    pub fn new(catalog: GroupCatalogEntry) -> Self {
        let states = catalog.rep_states();
        let fourier = catalog.fourier_matrix().ok();
        Self {
            catalog,
            states,
            fourier,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, irrep: usize, m: usize, n: usize) -> usize {
        let d = self.catalog.irreps[irrep].dim;
        self.catalog.block_offset(irrep) + m * d + n
    }

    /// Index of `|000>`, the trivial-irrep state.
    pub fn singlet_index(&self) -> Option<usize> {
        self.catalog.trivial_irrep().map(|t| self.state_index(t, 0, 0))
    }

    pub fn supports(&self, basis: Basis) -> bool {
        basis == Basis::Rep || self.fourier.is_some()
    }

    fn require_group_basis(&self) -> Result<&CMatrix> {
        self.fourier.as_ref().ok_or(Error::RequiresFinite("group-element basis"))
    }

    pub fn identity(&self, basis: Basis) -> LinkOperator {
        LinkOperator::new(basis, SparseMatrix::identity(self.dim()))
    }

    /// Rewrites a representation-basis operator in the group basis.
    pub fn to_group_basis(&self, op: &LinkOperator) -> Result<LinkOperator> {
        match op.basis {
            Basis::Group => Ok(op.clone()),
            Basis::Rep => {
                let f = self.require_group_basis()?;
                let dense = f * op.matrix.to_dense() * f.adjoint();
                Ok(LinkOperator::new(Basis::Group, SparseMatrix::from_dense(&dense)))
            }
        }
    }

    pub fn to_rep_basis(&self, op: &LinkOperator) -> Result<LinkOperator> {
        match op.basis {
            Basis::Rep => Ok(op.clone()),
            Basis::Group => {
                let f = self.require_group_basis()?;
                let dense = f.adjoint() * op.matrix.to_dense() * f;
                Ok(LinkOperator::new(Basis::Rep, SparseMatrix::from_dense(&dense)))
            }
        }
    }

    pub fn to_basis(&self, op: &LinkOperator, basis: Basis) -> Result<LinkOperator> {
        match basis {
            Basis::Rep => self.to_rep_basis(op),
            Basis::Group => self.to_group_basis(op),
        }
    }

    /// Block-diagonal operator acting with `blocks[j]` on the left (`m`) or
    /// right (`n`) index of every irrep block.
    fn one_sided(&self, side: Side, blocks: &[CMatrix]) -> SparseMatrix {
        let mut trip = Vec::new();
        for (j, r) in self.catalog.irreps.iter().enumerate() {
            let b = &blocks[j];
            for a in 0..r.dim {
                for c in 0..r.dim {
                    if b[(a, c)] == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for l in 0..r.dim {
                        let (row, col) = match side {
                            Side::Left => (self.state_index(j, a, l), self.state_index(j, c, l)),
                            Side::Right => (self.state_index(j, l, a), self.state_index(j, l, c)),
                        };
                        trip.push((row, col, b[(a, c)]));
                    }
                }
            }
        }
        SparseMatrix::from_triplets(self.dim(), self.dim(), trip)
    }

    /// `Theta^L_g`: `D^j(g)^*` on the left index, representation basis.
    pub fn theta_left(&self, g: &GroupElement) -> LinkOperator {
        let blocks: Vec<CMatrix> = (0..self.catalog.irreps.len())
            .map(|j| self.catalog.rep_matrix(j, g).map(|z| z.conj()))
            .collect();
        LinkOperator::new(Basis::Rep, self.one_sided(Side::Left, &blocks))
    }

    /// `Theta^R_g`: `D^j(g)` on the right index, representation basis.
    pub fn theta_right(&self, g: &GroupElement) -> LinkOperator {
        let blocks: Vec<CMatrix> = (0..self.catalog.irreps.len())
            .map(|j| self.catalog.rep_matrix(j, g))
            .collect();
        LinkOperator::new(Basis::Rep, self.one_sided(Side::Right, &blocks))
    }

    pub fn theta(&self, side: Side, g: &GroupElement) -> LinkOperator {
        match side {
            Side::Left => self.theta_left(g),
            Side::Right => self.theta_right(g),
        }
    }

    /// Translations in the group basis: `Theta^L_g |h> = |gh>`,
    /// `Theta^R_g |h> = |h g^-1>`.
    pub fn theta_group_basis(&self, g: usize, side: Side) -> Result<LinkOperator> {
        let spec = self.catalog.require_finite("theta_group_basis")?;
        self.require_group_basis()?;
        let trip = (0..spec.order)
            .map(|h| {
                let to = match side {
                    Side::Left => spec.mul[g][h],
                    Side::Right => spec.mul[h][spec.inv[g]],
                };
                (to, h, ONE)
            })
            .collect();
        Ok(LinkOperator::new(Basis::Group, SparseMatrix::from_triplets(spec.order, spec.order, trip)))
    }

    /// Transformation operator in the requested basis.
    pub fn theta_in(&self, side: Side, g: &GroupElement, basis: Basis) -> Result<LinkOperator> {
        match (basis, g) {
            (Basis::Rep, _) => Ok(self.theta(side, g)),
            (Basis::Group, GroupElement::Finite(x)) => self.theta_group_basis(*x, side),
            (Basis::Group, GroupElement::Lie(_)) => Err(Error::RequiresFinite("group-element basis")),
        }
    }

    /// The connection `U^j_{mm'}` in the representation basis:
    /// `<K N N'|U_{mm'}|J M M'> = sqrt(dim J / dim K) C[M,m,N] C[M',m',N']^*`,
    /// summed over included `J` and `K`. Channels leaving the truncation are
    /// dropped and listed in [`UMatrix::dropped`].
    pub fn u_matrix_rep(&self, j: usize) -> Result<UMatrix> {
        let dj = self.catalog.irreps[j].dim;
        let mut trip = vec![vec![Vec::new(); dj]; dj];
        let mut dropped = Vec::new();
        for (big_j, rj) in self.catalog.irreps.iter().enumerate() {
            let dec = decompose(&self.catalog, big_j, j);
            for t in &dec.terms {
                let Some(k) = t.irrep else {
                    dropped.push((rj.label.clone(), t.label.clone()));
                    continue;
                };
                let c = cg(&self.catalog, big_j, j, k)?;
                let dk = t.dim;
                let w = (rj.dim as f64 / dk as f64).sqrt();
                for bm in 0..rj.dim {
                    for m in 0..dj {
                        for n in 0..dk {
                            let left = c.get(bm, m, n);
                            if left.norm() == 0.0 {
                                continue;
                            }
                            for bmp in 0..rj.dim {
                                for mp in 0..dj {
                                    for np in 0..dk {
                                        let right = c.get(bmp, mp, np);
                                        if right.norm() == 0.0 {
                                            continue;
                                        }
                                        trip[m][mp].push((
                                            self.state_index(k, n, np),
                                            self.state_index(big_j, bm, bmp),
                                            left * right.conj() * w,
                                        ));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        let d = self.dim();
        let ops = trip
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|t| LinkOperator::new(Basis::Rep, SparseMatrix::from_triplets(d, d, t)))
                    .collect()
            })
            .collect();
        Ok(UMatrix { irrep: j, ops, dropped })
    }

    /// The connection in the group basis: `<g|U_{mn}|h> = D^j_{mn}(g) delta_{gh}`.
    pub fn u_matrix_group(&self, j: usize) -> Result<UMatrix> {
        let spec = self.catalog.require_finite("u_matrix_group")?;
        self.require_group_basis()?;
        let r = &self.catalog.irreps[j];
        let ops = (0..r.dim)
            .map(|m| {
                (0..r.dim)
                    .map(|n| {
                        let diag: Vec<C64> = (0..spec.order).map(|g| r.matrices[g][(m, n)]).collect();
                        LinkOperator::new(Basis::Group, SparseMatrix::from_diagonal(&diag))
                    })
                    .collect()
            })
            .collect();
        Ok(UMatrix {
            irrep: j,
            ops,
            dropped: Vec::new(),
        })
    }

    pub fn u_matrix(&self, j: usize, basis: Basis) -> Result<UMatrix> {
        match basis {
            Basis::Rep => self.u_matrix_rep(j),
            Basis::Group => self.u_matrix_group(j),
        }
    }

    /// `Pi_j`, diagonal in the representation basis.
    pub fn projector_rep(&self, j: usize) -> LinkOperator {
        let diag: Vec<C64> = self
            .states
            .iter()
            .map(|s| if s.irrep == j { ONE } else { C64::new(0.0, 0.0) })
            .collect();
        LinkOperator::new(Basis::Rep, SparseMatrix::from_diagonal(&diag))
    }

    /// `sum_j weights[j] Pi_j`.
    pub fn electric(&self, weights: &[f64]) -> LinkOperator {
        let diag: Vec<C64> = self.states.iter().map(|s| real(weights[s.irrep])).collect();
        LinkOperator::new(Basis::Rep, SparseMatrix::from_diagonal(&diag))
    }

    /// `Pi_C`, diagonal in the group basis.
    pub fn projector_class(&self, class: usize) -> Result<LinkOperator> {
        let spec = self.catalog.require_finite("projector_class")?;
        self.require_group_basis()?;
        let diag: Vec<C64> = spec
            .class_of
            .iter()
            .map(|&c| if c == class { ONE } else { C64::new(0.0, 0.0) })
            .collect();
        Ok(LinkOperator::new(Basis::Group, SparseMatrix::from_diagonal(&diag)))
    }

    /// Left and right generators `L_a = -T^T` on `m`, `R_a = T` on `n`.
    pub fn generators(&self) -> Result<(Vec<LinkOperator>, Vec<LinkOperator>)> {
        let lie = self.catalog.require_lie("generators")?;
        let mut left = Vec::new();
        let mut right = Vec::new();
        for a in 0..lie.algebra_dim() {
            let minus_t: Vec<CMatrix> = self
                .catalog
                .irreps
                .iter()
                .map(|r| -r.generators[a].transpose())
                .collect();
            let t: Vec<CMatrix> = self.catalog.irreps.iter().map(|r| r.generators[a].clone()).collect();
            left.push(LinkOperator::new(Basis::Rep, self.one_sided(Side::Left, &minus_t)));
            right.push(LinkOperator::new(Basis::Rep, self.one_sided(Side::Right, &t)));
        }
        Ok((left, right))
    }

    /// `Tr(U^dagger U) = sum_{m,k} U_{km}^dagger U_{km}` as an operator,
    /// with the closed-form prediction where one is known.
    pub fn trace_diagnostic(&self, j: usize) -> Result<TraceDiagnostic> {
        let u = self.u_matrix_rep(j)?;
        let d = self.dim();
        let mut sum = SparseMatrix::zeros(d, d);
        for row in &u.ops {
            for op in row {
                sum = sum.add(&op.matrix.adjoint().matmul(&op.matrix));
            }
        }
        let dj = self.catalog.irreps[j].dim as f64;
        let top_defect = match (&self.catalog.group, self.catalog.irreps[j].kind) {
            (GroupKind::Finite(_), _) => Some((0, 0.0)),
            (GroupKind::Lie(LieGroup::Su2 { twice_jmax }), IrrepKind::Spin { twice_j: 1 }) => {
                let jm = *twice_jmax as f64 / 2.0;
                Some((self.catalog.irreps.len() - 1, (2.0 * jm + 2.0) / (2.0 * jm + 1.0)))
            }
            (GroupKind::Lie(LieGroup::U1 { .. }), IrrepKind::Charge { p }) => {
                let top = if p > 0 { self.catalog.irreps.len() - 1 } else { 0 };
                Some((top, 1.0))
            }
            _ => None,
        };
        let predicted = top_defect.map(|(top, f)| {
            let diag: Vec<C64> = self
                .states
                .iter()
                .map(|s| real(if s.irrep == top { dj - f } else { dj }))
                .collect();
            SparseMatrix::from_diagonal(&diag)
        });
        let residual = predicted.as_ref().map(|p| p.max_abs_diff(&sum));
        Ok(TraceDiagnostic {
            operator: LinkOperator::new(Basis::Rep, sum),
            predicted: predicted.map(|p| LinkOperator::new(Basis::Rep, p)),
            defect: top_defect.map(|(_, f)| f),
            residual,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceDiagnostic {
    pub operator: LinkOperator,
    /// `dim(j) 1 - f P_top`, when a closed form is known.
    pub predicted: Option<LinkOperator>,
    /// The coefficient `f` of the top-irrep projector.
    pub defect: Option<f64>,
    pub residual: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_builtin, GroupParams};
    use crate::linalg::{commutator, exp_i_hermitian, max_abs_diff, I};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space(name: &str, kv: &[(&str, &str)]) -> LinkSpace {
        let params: GroupParams = kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        LinkSpace::new(build_builtin(name, &params).unwrap())
    }

    #[test]
    fn z2_theta_and_u() {
        let s = space("Z_N", &[("N", "2")]);
        let t = s.theta_left(&GroupElement::Finite(1));
        assert_eq!(t.matrix.to_dense(), CMatrix::from_row_slice(2, 2, &[ONE, real(0.0), real(0.0), -ONE]));
        let u = s.u_matrix_rep(1).unwrap();
        let sx = CMatrix::from_row_slice(2, 2, &[real(0.0), ONE, ONE, real(0.0)]);
        assert!(max_abs_diff(&u.get(0, 0).matrix.to_dense(), &sx) < 1e-15);
        let g = s.to_group_basis(u.get(0, 0)).unwrap();
        assert!(g.max_abs_diff(s.u_matrix_group(1).unwrap().get(0, 0)).unwrap() < 1e-15);
    }

    #[test]
    fn d3_rep_and_group_constructions_agree() {
        let s = space("D3", &[]);
        let rep = s.u_matrix_rep(2).unwrap();
        let grp = s.u_matrix_group(2).unwrap();
        for m in 0..2 {
            for n in 0..2 {
                let conj = s.to_group_basis(rep.get(m, n)).unwrap();
                assert!(conj.max_abs_diff(grp.get(m, n)).unwrap() < 1e-12);
            }
        }
        for g in 0..6 {
            for side in [Side::Left, Side::Right] {
                let rep = s.theta(side, &GroupElement::Finite(g));
                let conj = s.to_group_basis(&rep).unwrap();
                let perm = s.theta_group_basis(g, side).unwrap();
                assert!(conj.max_abs_diff(&perm).unwrap() < 1e-12);
            }
        }
        let diag = s.trace_diagnostic(2).unwrap();
        assert!(diag.residual.unwrap() < 1e-12);
        assert!(rep.dropped.is_empty());
    }

    #[test]
    fn basis_mixing_is_rejected() {
        let s = space("Z_N", &[("N", "3")]);
        let a = s.identity(Basis::Rep);
        let b = s.identity(Basis::Group);
        assert!(matches!(a.compose(&b), Err(Error::BasisMismatch { .. })));
    }

    #[test]
    fn su2_half_u_matrix_matches_printed_form() {
        let s = space("SU2_trunc", &[("J_max", "1/2")]);
        let u = s.u_matrix_rep(1).unwrap();
        let h = 1.0 / 2f64.sqrt();
        // basis: |000>, |up up>, |up dn>, |dn up>, |dn dn>
        let expect = |pairs: &[(usize, usize, f64)]| {
            let mut m = CMatrix::zeros(5, 5);
            for &(r, c, v) in pairs {
                m[(r, c)] = real(v * h);
            }
            m
        };
        let cases = [
            ((0, 0), expect(&[(1, 0, 1.0), (0, 4, 1.0)])),
            ((0, 1), expect(&[(2, 0, 1.0), (0, 3, -1.0)])),
            ((1, 0), expect(&[(3, 0, 1.0), (0, 2, -1.0)])),
            ((1, 1), expect(&[(0, 1, 1.0), (4, 0, 1.0)])),
        ];
        for ((m, n), e) in cases {
            assert!(max_abs_diff(&u.get(m, n).matrix.to_dense(), &e) < 1e-14, "U_{m}{n}");
        }
        assert_eq!(u.dropped, vec![("1/2".to_string(), "1".to_string())]);
    }

    #[test]
    fn su2_trace_defect() {
        for (jm, f) in [("1/2", 1.5), ("1", 4.0 / 3.0), ("3/2", 5.0 / 4.0)] {
            let s = space("SU2_trunc", &[("J_max", jm)]);
            let d = s.trace_diagnostic(1).unwrap();
            assert!((d.defect.unwrap() - f).abs() < 1e-15);
            assert!(d.residual.unwrap() < 1e-12, "J_max {jm}: {:?}", d.residual);
        }
    }

    #[test]
    fn su2_generators_and_covariance() {
        let s = space("SU2_trunc", &[("J_max", "1")]);
        let (l, r) = s.generators().unwrap();
        let u = s.u_matrix_rep(1).unwrap();
        let t = &s.catalog.irreps[1].generators;
        let dense = |o: &LinkOperator| o.matrix.to_dense();
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            assert!(max_abs_diff(&commutator(&dense(&l[a]), &dense(&l[b])), &(dense(&l[c]) * I)) < 1e-12);
            assert!(max_abs_diff(&commutator(&dense(&r[a]), &dense(&r[b])), &(dense(&r[c]) * I)) < 1e-12);
        }
        for a in 0..3 {
            for m in 0..2 {
                for n in 0..2 {
                    let mut lhs_l = CMatrix::zeros(s.dim(), s.dim());
                    let mut lhs_r = lhs_l.clone();
                    for k in 0..2 {
                        lhs_l -= dense(u.get(k, n)) * t[a][(m, k)];
                        lhs_r += dense(u.get(m, k)) * t[a][(k, n)];
                    }
                    assert!(max_abs_diff(&commutator(&dense(&l[a]), &dense(u.get(m, n))), &lhs_l) < 1e-12);
                    assert!(max_abs_diff(&commutator(&dense(&r[a]), &dense(u.get(m, n))), &lhs_r) < 1e-12);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let g = s.catalog.random_element(&mut rng);
            let GroupElement::Lie(alpha) = &g else { unreachable!() };
            let mut gen_l = CMatrix::zeros(s.dim(), s.dim());
            for (x, op) in alpha.iter().zip(&l) {
                gen_l += dense(op).scale(*x);
            }
            assert!(max_abs_diff(&exp_i_hermitian(&gen_l), &dense(&s.theta_left(&g))) < 1e-12);
        }
    }
}

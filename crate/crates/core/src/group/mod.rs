//! Groups, their unitary irreps, characters and the generalized Fourier transform.
//!
//! A [`GroupCatalogEntry`] bundles a group with the irreps the rest of the
//! crate needs. Finite groups carry a multiplication table and one matrix per
//! element for every irrep; truncated Lie groups (SU(2), U(1)) carry the
//! generator matrices of each included irrep instead.
//!
//! The canonical ordering of representation states `|j m n>` used everywhere
//! is: irreps in catalog order, then `(m, n)` row-major within each irrep.

mod builtin;
pub mod file;
mod validate;

pub use builtin::{
    build_builtin, format_spin, parse_group_ref, parse_half_integer, su2_generators, Builtin,
    GroupParams,
};
pub use validate::{validate, ValidationReport};

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{exp_i_hermitian, CMatrix, C64, ONE};

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSpec {
    pub name: String,
    pub order: usize,
    /// `mul[a][b]` is the index of the product `a * b`.
    pub mul: Vec<Vec<usize>>,
    pub identity: usize,
    pub inv: Vec<usize>,
    pub class_of: Vec<usize>,
    pub element_labels: Vec<String>,
}

impl GroupSpec {
    /// Derives identity, inverses and conjugacy classes from a table.
    ///
    /// Only the shape of the table is checked here; group axioms are left to
    /// [`validate`] so that defective tables can still be loaded and reported.
    pub fn from_table(name: impl Into<String>, mul: Vec<Vec<usize>>, labels: Vec<String>) -> Result<Self> {
        let order = mul.len();
        if order == 0 {
            return Err(Error::Parse("empty multiplication table".into()));
        }
        if mul.iter().any(|row| row.len() != order) {
            return Err(Error::Parse("multiplication table is not square".into()));
        }
        if mul.iter().flatten().any(|&x| x >= order) {
            return Err(Error::Parse("multiplication table entry out of range".into()));
        }
        if labels.len() != order {
            return Err(Error::Parse(format!(
                "{} element labels for a table of order {order}",
                labels.len()
            )));
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| mul[e][g] == g && mul[g][e] == g))
            .unwrap_or(0);
        let inv: Vec<usize> = (0..order)
            .map(|g| (0..order).find(|&h| mul[g][h] == identity).unwrap_or(identity))
            .collect();
        let mut class_of = vec![usize::MAX; order];
        let mut next = 0;
        for g in 0..order {
            if class_of[g] != usize::MAX {
                continue;
            }
            for h in 0..order {
                let conj = mul[mul[inv[h]][g]][h];
                if class_of[conj] == usize::MAX {
                    class_of[conj] = next;
                }
            }
            class_of[g] = next;
            next += 1;
        }
        Ok(Self {
            name: name.into(),
            order,
            mul,
            identity,
            inv,
            class_of,
            element_labels: labels,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.class_of.iter().max().map_or(0, |m| m + 1)
    }

    /// Members of every class, classes ordered by first member.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes()];
        for (g, &cl) in self.class_of.iter().enumerate() {
            out[cl].push(g);
        }
        out
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes().iter().map(Vec::len).collect()
    }

    #[inline]
    pub fn multiply(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }
}

/// Truncated compact Lie groups handled in representation form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LieGroup {
    /// Irreps `j = 0, 1/2, ..., J_max`; `twice_jmax = 2 J_max`.
    Su2 { twice_jmax: u32 },
    /// Charges `p = -P..=P`.
    U1 { cutoff: u32 },
}

impl LieGroup {
    /// Number of generators (3 for SU(2), 1 for U(1)).
    pub fn algebra_dim(&self) -> usize {
        match self {
            LieGroup::Su2 { .. } => 3,
            LieGroup::U1 { .. } => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupKind {
    Finite(GroupSpec),
    Lie(LieGroup),
}

/// Quantum numbers attached to an irrep, where they exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IrrepKind {
    Finite,
    /// SU(2) spin `j = twice_j / 2`.
    Spin { twice_j: u32 },
    /// U(1) charge.
    Charge { p: i32 },
}

/// One unitary irreducible representation.
#[derive(Clone, Debug, PartialEq)]
pub struct Irrep {
    pub label: String,
    pub dim: usize,
    pub kind: IrrepKind,
    /// `D^j(g)` for every element (finite groups only).
    pub matrices: Vec<CMatrix>,
    /// Hermitian generators `T^j_a` (Lie groups only).
    pub generators: Vec<CMatrix>,
    pub casimir: Option<f64>,
}

/// A group element: an index for finite groups, algebra coordinates
/// `alpha` with `D(g) = exp(i alpha . T)` for Lie groups.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupElement {
    Finite(usize),
    Lie(Vec<f64>),
}

/// One `|j m n>` basis state of a link.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RepState {
    pub irrep: usize,
    pub m: usize,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupCatalogEntry {
    pub name: String,
    pub group: GroupKind,
    pub irreps: Vec<Irrep>,
    /// Index of the irrep carried by matter and used in plaquettes.
    pub fundamental: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CharacterTable {
    pub irrep_labels: Vec<String>,
    pub class_sizes: Vec<usize>,
    pub class_representatives: Vec<usize>,
    /// `chi[irrep][class]`.
    pub chi: Vec<Vec<C64>>,
    /// Largest spread of `Tr D^j(g)` within one class.
    pub class_function_residual: f64,
}

impl CharacterTable {
    pub fn num_classes(&self) -> usize {
        self.class_sizes.len()
    }
}

impl GroupCatalogEntry {
    pub fn finite(&self) -> Option<&GroupSpec> {
        match &self.group {
            GroupKind::Finite(g) => Some(g),
            GroupKind::Lie(_) => None,
        }
    }

    pub fn require_finite(&self, op: &'static str) -> Result<&GroupSpec> {
        self.finite().ok_or(Error::RequiresFinite(op))
    }

    pub fn lie(&self) -> Option<LieGroup> {
        match &self.group {
            GroupKind::Lie(l) => Some(*l),
            GroupKind::Finite(_) => None,
        }
    }

    pub fn require_lie(&self, op: &'static str) -> Result<LieGroup> {
        self.lie().ok_or(Error::RequiresLie(op))
    }

    pub fn is_finite(&self) -> bool {
        self.finite().is_some()
    }

    pub fn order(&self) -> Option<usize> {
        self.finite().map(|g| g.order)
    }

    pub fn fundamental_irrep(&self) -> &Irrep {
        &self.irreps[self.fundamental]
    }

    pub fn irrep_index(&self, label: &str) -> Result<usize> {
        self.irreps
            .iter()
            .position(|r| r.label == label)
            .ok_or_else(|| Error::UnknownIrrep(label.to_string()))
    }

    /// The one-dimensional irrep with `D(g) = 1` everywhere.
    pub fn trivial_irrep(&self) -> Option<usize> {
        self.irreps.iter().position(|r| {
            r.dim == 1
                && match self.group {
                    GroupKind::Finite(_) => r.matrices.iter().all(|m| (m[(0, 0)] - ONE).norm() < 1e-12),
                    GroupKind::Lie(_) => r.generators.iter().all(|t| t[(0, 0)].norm() < 1e-12),
                }
        })
    }

    /// `sum_j dim(j)^2` over the included irreps.
    pub fn dim_sum_squares(&self) -> usize {
        self.irreps.iter().map(|r| r.dim * r.dim).sum()
    }

    /// Canonical representation-basis ordering.
    pub fn rep_states(&self) -> Vec<RepState> {
        let mut out = Vec::with_capacity(self.dim_sum_squares());
        for (irrep, r) in self.irreps.iter().enumerate() {
            for m in 0..r.dim {
                for n in 0..r.dim {
                    out.push(RepState { irrep, m, n });
                }
            }
        }
        out
    }

    /// Offset of irrep `j`'s block in the canonical rep basis.
    pub fn block_offset(&self, irrep: usize) -> usize {
        self.irreps[..irrep].iter().map(|r| r.dim * r.dim).sum()
    }

    pub fn identity_element(&self) -> GroupElement {
        match &self.group {
            GroupKind::Finite(g) => GroupElement::Finite(g.identity),
            GroupKind::Lie(l) => GroupElement::Lie(vec![0.0; l.algebra_dim()]),
        }
    }

    /// All elements of a finite group, empty for Lie groups.
    pub fn elements(&self) -> Vec<GroupElement> {
        match &self.group {
            GroupKind::Finite(g) => (0..g.order).map(GroupElement::Finite).collect(),
            GroupKind::Lie(_) => Vec::new(),
        }
    }

    /// Uniform element (finite) or algebra coordinates in `[-pi, pi)` (Lie).
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> GroupElement {
        match &self.group {
            GroupKind::Finite(g) => GroupElement::Finite(rng.random_range(0..g.order)),
            GroupKind::Lie(l) => GroupElement::Lie(
                (0..l.algebra_dim())
                    .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                    .collect(),
            ),
        }
    }

    pub fn multiply(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        match (&self.group, a, b) {
            (GroupKind::Finite(g), GroupElement::Finite(x), GroupElement::Finite(y)) => {
                GroupElement::Finite(g.mul[*x][*y])
            }
            (GroupKind::Lie(LieGroup::U1 { .. }), GroupElement::Lie(x), GroupElement::Lie(y)) => {
                GroupElement::Lie(vec![x[0] + y[0]])
            }
            (GroupKind::Lie(LieGroup::Su2 { .. }), GroupElement::Lie(x), GroupElement::Lie(y)) => {
                let prod = su2_fundamental(x) * su2_fundamental(y);
                GroupElement::Lie(su2_coordinates(&prod).to_vec())
            }
            _ => panic!("group element does not match the catalog entry"),
        }
    }

    pub fn inverse(&self, a: &GroupElement) -> GroupElement {
        match (&self.group, a) {
            (GroupKind::Finite(g), GroupElement::Finite(x)) => GroupElement::Finite(g.inv[*x]),
            (GroupKind::Lie(_), GroupElement::Lie(x)) => GroupElement::Lie(x.iter().map(|v| -v).collect()),
            _ => panic!("group element does not match the catalog entry"),
        }
    }

    /// `D^j(g)`.
    pub fn rep_matrix(&self, irrep: usize, g: &GroupElement) -> CMatrix {
        let r = &self.irreps[irrep];
        match g {
            GroupElement::Finite(idx) => r.matrices[*idx].clone(),
            GroupElement::Lie(alpha) => {
                assert_eq!(alpha.len(), r.generators.len(), "algebra dimension mismatch");
                let mut h = CMatrix::zeros(r.dim, r.dim);
                for (a, t) in alpha.iter().zip(&r.generators) {
                    h += t.scale(*a);
                }
                exp_i_hermitian(&h)
            }
        }
    }

    /// Determinant of `g` in the fundamental irrep.
    pub fn fundamental_det(&self, g: &GroupElement) -> C64 {
        self.rep_matrix(self.fundamental, g).determinant()
    }

    pub fn character_table(&self) -> Result<CharacterTable> {
        let g = self.require_finite("character_table")?;
        let classes = g.classes();
        let mut chi = Vec::with_capacity(self.irreps.len());
        let mut spread: f64 = 0.0;
        for r in &self.irreps {
            let mut row = Vec::with_capacity(classes.len());
            for members in &classes {
                let first = r.matrices[members[0]].trace();
                for &h in &members[1..] {
                    spread = spread.max((r.matrices[h].trace() - first).norm());
                }
                row.push(first);
            }
            chi.push(row);
        }
        Ok(CharacterTable {
            irrep_labels: self.irreps.iter().map(|r| r.label.clone()).collect(),
            class_sizes: classes.iter().map(Vec::len).collect(),
            class_representatives: classes.iter().map(|c| c[0]).collect(),
            chi,
            class_function_residual: spread,
        })
    }

    /// `F[g][(j,m,n)] = sqrt(dim j / |G|) D^j_{mn}(g)`, columns in canonical order.
    pub fn fourier_matrix(&self) -> Result<CMatrix> {
        let g = self.require_finite("fourier_matrix")?;
        let sum = self.dim_sum_squares();
        if sum != g.order {
            return Err(Error::IncompleteIrreps { sum, order: g.order });
        }
        let states = self.rep_states();
        let mut f = CMatrix::zeros(g.order, sum);
        for el in 0..g.order {
            for (col, s) in states.iter().enumerate() {
                let r = &self.irreps[s.irrep];
                let norm = (r.dim as f64 / g.order as f64).sqrt();
                f[(el, col)] = r.matrices[el][(s.m, s.n)] * norm;
            }
        }
        Ok(f)
    }
}

/// `exp(i alpha . sigma / 2)`.
pub(crate) fn su2_fundamental(alpha: &[f64]) -> CMatrix {
    let t = su2_generators(1);
    let mut h = CMatrix::zeros(2, 2);
    for (a, g) in alpha.iter().zip(t.iter()) {
        h += g.scale(*a);
    }
    exp_i_hermitian(&h)
}

/// Algebra coordinates `gamma` with `exp(i gamma . sigma / 2) = u`, `|gamma| <= 2 pi`.
pub(crate) fn su2_coordinates(u: &CMatrix) -> [f64; 3] {
    let a0 = 0.5 * (u[(0, 0)] + u[(1, 1)]).re;
    let a1 = 0.5 * (u[(0, 1)] + u[(1, 0)]).im;
    let a2 = 0.5 * (u[(0, 1)] - u[(1, 0)]).re;
    let a3 = 0.5 * (u[(0, 0)] - u[(1, 1)]).im;
    let s = (a1 * a1 + a2 * a2 + a3 * a3).sqrt();
    if s < 1e-15 {
        return if a0 > 0.0 { [0.0; 3] } else { [2.0 * std::f64::consts::PI, 0.0, 0.0] };
    }
    let theta = 2.0 * s.atan2(a0);
    [theta * a1 / s, theta * a2 / s, theta * a3 / s]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn su2_coordinates_invert_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a: Vec<f64> = (0..3).map(|_| rng.random_range(-3.0..3.0)).collect();
            let u = su2_fundamental(&a);
            let back = su2_fundamental(&su2_coordinates(&u));
            assert!(max_abs_diff(&u, &back) < 1e-12);
        }
    }

    #[test]
    fn lie_composition_is_a_homomorphism_for_all_spins() {
        let entry = build_builtin("SU2_trunc", &[("J_max".to_string(), "3/2".to_string())].into()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let g = entry.random_element(&mut rng);
            let h = entry.random_element(&mut rng);
            let gh = entry.multiply(&g, &h);
            for j in 0..entry.irreps.len() {
                let lhs = entry.rep_matrix(j, &g) * entry.rep_matrix(j, &h);
                assert!(max_abs_diff(&lhs, &entry.rep_matrix(j, &gh)) < 1e-11, "j index {j}");
            }
        }
    }

    #[test]
    fn classes_of_d3() {
        let entry = build_builtin("D3", &GroupParams::new()).unwrap();
        let g = entry.finite().unwrap();
        assert_eq!(g.class_sizes(), vec![1, 2, 3]);
        assert_eq!(g.identity, 0);
    }
}

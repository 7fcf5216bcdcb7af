use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::operator::{LinearMap, OperatorSum};
use super::{GlobalBasis, LatticeSpec, Link, Plaquette};
use crate::error::{Error, Result};
use crate::group::{GroupCatalogEntry, GroupElement, GroupKind, IrrepKind};
use crate::link::{Basis, LinkOperator, LinkSpace, Side, UMatrix};
use crate::linalg::{c, real, CMatrix, C64, ONE, ZERO};
use crate::matter::VertexFock;
use crate::sparse::SparseMatrix;

/// Which Hamiltonian terms to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TermSet {
    pub mass: bool,
    pub tunneling: bool,
    pub electric: bool,
    pub magnetic: bool,
}

impl Default for TermSet {
    fn default() -> Self {
        Self {
            mass: true,
            tunneling: true,
            electric: true,
            magnetic: true,
        }
    }
}

impl TermSet {
    pub fn magnetic_only() -> Self {
        Self {
            mass: false,
            tunneling: false,
            electric: false,
            magnetic: true,
        }
    }

    pub fn electric_only() -> Self {
        Self {
            mass: false,
            tunneling: false,
            electric: true,
            magnetic: false,
        }
    }
}

/// Electric energy `E(j)` per irrep label.
pub type ElectricWeights = BTreeMap<String, f64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    pub mass: f64,
    /// Uniform tunneling amplitude.
    pub epsilon: f64,
    /// Per-link amplitudes `[re, im]`, overriding `epsilon`.
    pub link_epsilon: Option<Vec<[f64; 2]>>,
    pub coupling: f64,
    /// Defaults: `j(j+1)` for SU(2), `p^2` for U(1), `min(p, N-p)^2` for Z_N.
    pub electric_weights: Option<ElectricWeights>,
    /// Irrep used in plaquettes; defaults to the fundamental.
    pub magnetic_irrep: Option<String>,
    pub staggered: bool,
    pub terms: TermSet,
    /// Builds the tunneling and magnetic terms without their conjugates.
    pub drop_hermitian_conjugate: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            mass: 0.0,
            epsilon: 1.0,
            link_epsilon: None,
            coupling: 1.0,
            electric_weights: None,
            magnetic_irrep: None,
            staggered: true,
            terms: TermSet::default(),
            drop_hermitian_conjugate: false,
        }
    }
}

/// Built-in electric weights, where the catalog has a canonical choice.
pub fn default_electric_weights(entry: &GroupCatalogEntry) -> Option<Vec<f64>> {
    match &entry.group {
        GroupKind::Lie(_) => Some(
            entry
                .irreps
                .iter()
                .map(|r| match r.kind {
                    IrrepKind::Charge { p } => (p * p) as f64,
                    _ => r.casimir.unwrap_or(0.0),
                })
                .collect(),
        ),
        GroupKind::Finite(g) => {
            let n = g.order;
            let cyclic = entry.irreps.len() == n
                && (0..n).all(|p| entry.irreps[p].label == format!("p{p}") && entry.irreps[p].dim == 1)
                && (0..n).all(|a| (0..n).all(|b| g.mul[a][b] == (a + b) % n));
            cyclic.then(|| (0..n).map(|p| p.min(n - p).pow(2) as f64).collect())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermKind {
    Mass,
    Tunneling,
    Electric,
    Magnetic,
}

/// The Hamiltonian kept term by term.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    pub terms: Vec<(TermKind, OperatorSum)>,
    pub basis: GlobalBasis,
}

impl Hamiltonian {
    pub fn total(&self) -> OperatorSum {
        let mut out = OperatorSum::new(self.basis.clone());
        for (_, t) in &self.terms {
            out.extend(t.clone());
        }
        out
    }

    pub fn term(&self, kind: TermKind) -> Option<&OperatorSum> {
        self.terms.iter().find(|(k, _)| *k == kind).map(|(_, t)| t)
    }
}

impl LinearMap for Hamiltonian {
    fn dim(&self) -> usize {
        self.basis.dim
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; x.len()];
        self.apply_into(x, &mut y);
        y
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        if self.terms.is_empty() {
            y.fill(ZERO);
            return;
        }
        let parts: Vec<&OperatorSum> = self.terms.iter().map(|(_, t)| t).collect();
        OperatorSum::apply_sum_into(&parts, x, y);
    }
}

/// A lattice gauge model: geometry, couplings and the single-site spaces.
#[derive(Clone, Debug)]
pub struct Model {
    pub lattice: LatticeSpec,
    pub params: ModelParams,
    pub link_space: LinkSpace,
    pub link_basis: Basis,
    pub basis: GlobalBasis,
    pub links: Vec<Link>,
    pub plaquettes: Vec<Plaquette>,
    pub electric_weights: Vec<f64>,
    pub magnetic_irrep: usize,
}

impl Model {
    pub fn new(catalog: GroupCatalogEntry, lattice: LatticeSpec, params: ModelParams, link_basis: Basis) -> Result<Self> {
        lattice.validate(params.staggered && lattice.include_matter)?;
        let link_space = LinkSpace::new(catalog);
        if !link_space.supports(link_basis) {
            return Err(Error::InvalidModel(
                "the group basis needs a finite group with a complete irrep set".into(),
            ));
        }
        let terms = params.terms;
        if (terms.electric || terms.magnetic) && params.coupling == 0.0 {
            return Err(Error::InvalidModel("coupling must be nonzero".into()));
        }
        let cat = &link_space.catalog;
        let electric_weights = match &params.electric_weights {
            Some(table) => {
                let missing: Vec<&str> = cat
                    .irreps
                    .iter()
                    .filter(|r| !table.contains_key(&r.label))
                    .map(|r| r.label.as_str())
                    .collect();
                if !missing.is_empty() && terms.electric {
                    return Err(Error::InvalidModel(format!(
                        "electric weights missing for irreps {}",
                        missing.join(", ")
                    )));
                }
                cat.irreps.iter().map(|r| table.get(&r.label).copied().unwrap_or(0.0)).collect()
            }
            None => match default_electric_weights(cat) {
                Some(w) => w,
                None if terms.electric => {
                    return Err(Error::InvalidModel(format!(
                        "{} has no default electric weights; supply a table",
                        cat.name
                    )))
                }
                None => vec![0.0; cat.irreps.len()],
            },
        };
        let magnetic_irrep = match &params.magnetic_irrep {
            Some(label) => cat.irrep_index(label)?,
            None => cat.fundamental,
        };
        let links = lattice.links();
        if let Some(eps) = &params.link_epsilon {
            if eps.len() != links.len() {
                return Err(Error::InvalidModel(format!(
                    "{} tunneling amplitudes for {} links",
                    eps.len(),
                    links.len()
                )));
            }
        }
        let mut dims = Vec::new();
        if lattice.include_matter {
            dims.extend(std::iter::repeat_n(1 << cat.fundamental_irrep().dim, lattice.num_vertices()));
        }
        dims.extend(std::iter::repeat_n(link_space.dim(), links.len()));
        let plaquettes = lattice.plaquettes();
        Ok(Self {
            basis: GlobalBasis::new(dims),
            lattice,
            params,
            link_space,
            link_basis,
            links,
            plaquettes,
            electric_weights,
            magnetic_irrep,
        })
    }

    pub fn catalog(&self) -> &GroupCatalogEntry {
        &self.link_space.catalog
    }

    pub fn dim(&self) -> usize {
        self.basis.dim
    }

    pub fn has_matter(&self) -> bool {
        self.lattice.include_matter
    }

    pub fn vertex_factor(&self, v: usize) -> Result<usize> {
        let count = self.lattice.num_vertices();
        if v >= count {
            return Err(Error::VertexOutOfRange { index: v, count });
        }
        if !self.has_matter() {
            return Err(Error::InvalidModel("model has no matter factors".into()));
        }
        Ok(v)
    }

    pub fn link_factor(&self, l: usize) -> usize {
        let offset = if self.has_matter() { self.lattice.num_vertices() } else { 0 };
        offset + l
    }

    /// Sublattice parity entering masses and `Theta^Q`; 0 everywhere when unstaggered.
    pub fn vertex_parity(&self, v: usize) -> u8 {
        if self.params.staggered {
            self.lattice.parity(v)
        } else {
            0
        }
    }

    pub fn vertex_space(&self, v: usize) -> VertexFock {
        VertexFock::for_catalog(self.catalog(), self.vertex_parity(v))
    }

    fn link_op(&self, op: &LinkOperator) -> Result<SparseMatrix> {
        Ok(self.link_space.to_basis(op, self.link_basis)?.matrix)
    }

    /// Places a link operator on link `l`; its basis must match the model's.
    pub fn embed_link(&self, op: &LinkOperator, l: usize) -> Result<OperatorSum> {
        if op.basis != self.link_basis {
            return Err(Error::BasisMismatch {
                expected: self.link_basis.to_string(),
                found: op.basis.to_string(),
            });
        }
        if l >= self.links.len() {
            return Err(Error::InvalidLattice(format!("link {l} out of range")));
        }
        Ok(OperatorSum::single(
            self.basis.clone(),
            vec![self.link_factor(l)],
            op.matrix.clone(),
            Vec::new(),
        ))
    }

    pub fn embed_vertex(&self, op: SparseMatrix, v: usize) -> Result<OperatorSum> {
        let f = self.vertex_factor(v)?;
        Ok(OperatorSum::single(self.basis.clone(), vec![f], op, Vec::new()))
    }

    fn strings_before(&self, v: usize) -> Vec<usize> {
        (0..v).collect()
    }

    /// `psi_{v,a}` with its Jordan-Wigner string over earlier vertices.
    pub fn psi(&self, v: usize, a: usize) -> Result<OperatorSum> {
        let f = self.vertex_factor(v)?;
        let m = self.vertex_space(v).psi(a)?;
        Ok(OperatorSum::single(self.basis.clone(), vec![f], m, self.strings_before(v)))
    }

    pub fn psi_dagger(&self, v: usize, a: usize) -> Result<OperatorSum> {
        Ok(self.psi(v, a)?.adjoint())
    }

    /// Local factors of `psi+_{n,a} psi_{n',b}` for `n != n'`:
    /// `(support, [(a, b, matrix over support)], strings)`.
    fn hopping_parts(&self, n: usize, np: usize) -> Result<(Vec<usize>, Vec<Vec<SparseMatrix>>, Vec<usize>)> {
        let (fa, fb) = (self.vertex_factor(n)?, self.vertex_factor(np)?);
        let (va, vb) = (self.vertex_space(n), self.vertex_space(np));
        let dim = va.n_modes;
        let mut mats = vec![Vec::with_capacity(dim); dim];
        for (a, row) in mats.iter_mut().enumerate() {
            for b in 0..dim {
                let (left, right) = if n < np {
                    (va.psi_dagger(a)?.matmul(&va.parity_operator()), vb.psi(b)?)
                } else {
                    (va.psi_dagger(a)?, vb.parity_operator().matmul(&vb.psi(b)?))
                };
                row.push(left.kron(&right));
            }
        }
        let (lo, hi) = (n.min(np), n.max(np));
        Ok((vec![fa, fb], mats, (lo + 1..hi).collect()))
    }

    /// `sum_ab coeffs[a][b] psi+_{n,a} psi_{n',b}`.
    pub fn embed_fermion_bilinear(&self, n: usize, np: usize, coeffs: &CMatrix) -> Result<OperatorSum> {
        if n == np {
            let f = self.vertex_factor(n)?;
            let m = self.vertex_space(n).one_body(coeffs);
            return Ok(OperatorSum::single(self.basis.clone(), vec![f], m, Vec::new()));
        }
        let (support, mats, strings) = self.hopping_parts(n, np)?;
        let d = mats[0][0].nrows();
        let mut total = SparseMatrix::zeros(d, d);
        for (a, row) in mats.iter().enumerate() {
            for (b, m) in row.iter().enumerate() {
                total = total.axpy(coeffs[(a, b)], m);
            }
        }
        Ok(OperatorSum::single(self.basis.clone(), support, total, strings))
    }

    fn u_fundamental(&self) -> Result<UMatrix> {
        self.link_space.u_matrix(self.catalog().fundamental, self.link_basis)
    }

    pub fn mass_term(&self) -> Result<OperatorSum> {
        let mut out = OperatorSum::new(self.basis.clone());
        if !self.has_matter() {
            return Ok(out);
        }
        for v in 0..self.lattice.num_vertices() {
            let sign = if self.vertex_parity(v) == 1 { -1.0 } else { 1.0 };
            let m = self.vertex_space(v).number().scale(real(sign * self.params.mass));
            out.push(vec![self.vertex_factor(v)?], m, Vec::new());
        }
        Ok(out)
    }

    pub fn link_epsilon(&self, l: usize) -> C64 {
        match &self.params.link_epsilon {
            Some(e) => c(e[l][0], e[l][1]),
            None => real(self.params.epsilon),
        }
    }

    /// `eps psi+_n U psi_{n+k}` on one link, without its conjugate.
    pub fn hopping(&self, l: usize) -> Result<OperatorSum> {
        let link = self.links[l];
        let u = self.u_fundamental()?;
        let (mut support, mats, strings) = self.hopping_parts(link.from, link.to)?;
        support.push(self.link_factor(l));
        let d = mats[0][0].nrows() * self.link_space.dim();
        let mut total = SparseMatrix::zeros(d, d);
        for (a, row) in mats.iter().enumerate() {
            for (b, m) in row.iter().enumerate() {
                total = total.add(&m.kron(&u.get(a, b).matrix));
            }
        }
        let total = total.scale(self.link_epsilon(l));
        Ok(OperatorSum::single(self.basis.clone(), support, total, strings))
    }

    pub fn tunneling_term(&self) -> Result<OperatorSum> {
        let mut out = OperatorSum::new(self.basis.clone());
        if !self.has_matter() {
            return Ok(out);
        }
        for l in 0..self.links.len() {
            let h = self.hopping(l)?;
            let t = &h.terms[0];
            let m = if self.params.drop_hermitian_conjugate {
                t.matrix.clone()
            } else {
                t.matrix.add(&t.matrix.adjoint())
            };
            out.push(t.support.clone(), m, t.strings.clone());
        }
        Ok(out)
    }

    /// `sum_j E(j) Pi_j` on one link, in the model basis.
    pub fn link_electric(&self) -> Result<SparseMatrix> {
        self.link_op(&self.link_space.electric(&self.electric_weights))
    }

    pub fn electric_term(&self) -> Result<OperatorSum> {
        let g2 = self.params.coupling.powi(2);
        let m = self.link_electric()?.scale(real(g2 / 2.0));
        let mut out = OperatorSum::new(self.basis.clone());
        for l in 0..self.links.len() {
            out.push(vec![self.link_factor(l)], m.clone(), Vec::new());
        }
        Ok(out)
    }

    /// `Tr(U_1 U_2 U_3^dagger U_4^dagger)` over the four plaquette links, in
    /// irrep `j`, as a matrix over those links.
    pub fn plaquette_trace(&self, j: usize) -> Result<SparseMatrix> {
        let u = self.link_space.u_matrix(j, self.link_basis)?;
        let d = u.dim();
        let mut total: Option<SparseMatrix> = None;
        let adj: Vec<Vec<SparseMatrix>> = (0..d)
            .map(|a| (0..d).map(|b| u.get(a, b).matrix.adjoint()).collect())
            .collect();
        for a in 0..d {
            for b in 0..d {
                for cc in 0..d {
                    for dd in 0..d {
                        let m = u.get(a, b)
                            .matrix
                            .kron(&u.get(b, cc).matrix)
                            .kron(&adj[dd][cc])
                            .kron(&adj[a][dd]);
                        total = Some(match total {
                            Some(t) => t.add(&m),
                            None => m,
                        });
                    }
                }
            }
        }
        Ok(total.expect("irrep has positive dimension"))
    }

    pub fn wilson_loop(&self, p: usize) -> Result<OperatorSum> {
        let w = self.plaquette_trace(self.magnetic_irrep)?;
        let support = self.plaquettes[p].links.iter().map(|&l| self.link_factor(l)).collect();
        Ok(OperatorSum::single(self.basis.clone(), support, w, Vec::new()))
    }

    /// `-(1 / 2g^2) sum_p (Tr W_p + h.c.)`.
    pub fn magnetic_term(&self) -> Result<OperatorSum> {
        let mut out = OperatorSum::new(self.basis.clone());
        if self.plaquettes.is_empty() {
            return Ok(out);
        }
        let w = self.plaquette_trace(self.magnetic_irrep)?;
        let sum = if self.params.drop_hermitian_conjugate {
            w
        } else {
            w.add(&w.adjoint())
        };
        let m = sum.scale(real(-0.5 / self.params.coupling.powi(2)));
        for p in &self.plaquettes {
            let support = p.links.iter().map(|&l| self.link_factor(l)).collect();
            out.push(support, m.clone(), Vec::new());
        }
        Ok(out)
    }

    /// The magnetic term from class projectors,
    /// `-(1 / 2g^2) sum_p sum_C chi_j(C) Pi_{C,p} + h.c.`, in the group basis.
    pub fn magnetic_class_form(&self) -> Result<OperatorSum> {
        let spec = self.catalog().require_finite("magnetic_class_form")?;
        if self.link_basis != Basis::Group {
            return Err(Error::BasisMismatch {
                expected: Basis::Group.to_string(),
                found: self.link_basis.to_string(),
            });
        }
        let table = self.catalog().character_table()?;
        let chi = &table.chi[self.magnetic_irrep];
        let n = spec.order;
        let scale = -0.5 / self.params.coupling.powi(2);
        let diag: Vec<C64> = (0..n.pow(4))
            .map(|idx| {
                let (g1, g2, g3, g4) = (idx / (n * n * n), (idx / (n * n)) % n, (idx / n) % n, idx % n);
                let gp = spec.mul[spec.mul[spec.mul[g1][g2]][spec.inv[g3]]][spec.inv[g4]];
                let x = chi[spec.class_of[gp]];
                real(scale * (x + x.conj()).re)
            })
            .collect();
        let m = SparseMatrix::from_diagonal(&diag);
        let mut out = OperatorSum::new(self.basis.clone());
        for p in &self.plaquettes {
            let support = p.links.iter().map(|&l| self.link_factor(l)).collect();
            out.push(support, m.clone(), Vec::new());
        }
        Ok(out)
    }

    pub fn hamiltonian(&self) -> Result<Hamiltonian> {
        let t = self.params.terms;
        let mut terms = Vec::new();
        if t.mass && self.has_matter() {
            terms.push((TermKind::Mass, self.mass_term()?));
        }
        if t.tunneling && self.has_matter() && !self.links.is_empty() {
            terms.push((TermKind::Tunneling, self.tunneling_term()?));
        }
        if t.electric && !self.links.is_empty() {
            terms.push((TermKind::Electric, self.electric_term()?));
        }
        if t.magnetic && !self.plaquettes.is_empty() {
            terms.push((TermKind::Magnetic, self.magnetic_term()?));
        }
        Ok(Hamiltonian {
            terms,
            basis: self.basis.clone(),
        })
    }

    /// Support and per-factor operators of the gauge transformation at `v`.
    fn star_factors(&self, v: usize, g: &GroupElement) -> Result<(Vec<usize>, Vec<SparseMatrix>)> {
        let count = self.lattice.num_vertices();
        if v >= count {
            return Err(Error::VertexOutOfRange { index: v, count });
        }
        let (out_links, in_links) = self.lattice.star(v);
        let mut support = Vec::new();
        let mut mats = Vec::new();
        if self.has_matter() {
            support.push(self.vertex_factor(v)?);
            mats.push(self.vertex_space(v).theta_q(self.catalog(), g));
        }
        for (links, side) in [(&out_links, Side::Left), (&in_links, Side::Right)] {
            for &l in links {
                support.push(self.link_factor(l));
                mats.push(self.link_space.theta_in(side, g, self.link_basis)?.matrix);
            }
        }
        Ok((support, mats))
    }

    /// `Theta_{g,v}`: `Theta^L` on outgoing links, `Theta^R` on incoming
    /// links and `Theta^Q` on the vertex. The factors act on different
    /// spaces, so their order does not matter.
    pub fn gauss_operator(&self, v: usize, g: &GroupElement) -> Result<OperatorSum> {
        let (support, mats) = self.star_factors(v, g)?;
        let m = mats
            .into_iter()
            .reduce(|a, b| a.kron(&b))
            .unwrap_or_else(|| SparseMatrix::identity(1));
        Ok(OperatorSum::single(self.basis.clone(), support, m, Vec::new()))
    }

    /// `G_{a,v} = sum_in R_a + sum_out L_a + Q_a` for Lie groups.
    pub fn gauss_generators(&self, v: usize) -> Result<Vec<OperatorSum>> {
        let lie = self.catalog().require_lie("gauss_generators")?;
        let count = self.lattice.num_vertices();
        if v >= count {
            return Err(Error::VertexOutOfRange { index: v, count });
        }
        let (left, right) = self.link_space.generators()?;
        let charges = if self.has_matter() {
            Some(self.vertex_space(v).charges(self.catalog())?)
        } else {
            None
        };
        let (out_links, in_links) = self.lattice.star(v);
        let mut gens = Vec::new();
        for a in 0..lie.algebra_dim() {
            let mut g = OperatorSum::new(self.basis.clone());
            for &l in &out_links {
                g.push(vec![self.link_factor(l)], left[a].matrix.clone(), Vec::new());
            }
            for &l in &in_links {
                g.push(vec![self.link_factor(l)], right[a].matrix.clone(), Vec::new());
            }
            if let Some(q) = &charges {
                g.push(vec![self.vertex_factor(v)?], q[a].clone(), Vec::new());
            }
            gens.push(g);
        }
        Ok(gens)
    }

    /// `(dim s / |G|) sum_g chi_s(g)^* Theta_{g,v}`.
    pub fn vertex_projector(&self, v: usize, sector: usize) -> Result<OperatorSum> {
        let spec = self.catalog().require_finite("physical_projector")?;
        let r = &self.catalog().irreps[sector];
        let w = r.dim as f64 / spec.order as f64;
        let mut total: Option<SparseMatrix> = None;
        let mut support = Vec::new();
        for g in 0..spec.order {
            let (s, mats) = self.star_factors(v, &GroupElement::Finite(g))?;
            support = s;
            let m = mats
                .into_iter()
                .reduce(|a, b| a.kron(&b))
                .unwrap_or_else(|| SparseMatrix::identity(1))
                .scale(r.matrices[g].trace().conj() * w);
            total = Some(match total {
                Some(t) => t.add(&m),
                None => m,
            });
        }
        Ok(OperatorSum::single(
            self.basis.clone(),
            support,
            total.expect("group is nonempty"),
            Vec::new(),
        ))
    }

    /// Projector onto the sector with irrep `sector[v]` at every vertex
    /// (trivial everywhere when `None`).
    pub fn physical_projector(&self, sector: Option<&[usize]>) -> Result<OperatorChain> {
        let trivial = self
            .catalog()
            .trivial_irrep()
            .ok_or_else(|| Error::InvalidModel("catalog has no trivial irrep".into()))?;
        let n = self.lattice.num_vertices();
        if let Some(s) = sector {
            if s.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: s.len(),
                });
            }
        }
        let factors = (0..n)
            .map(|v| self.vertex_projector(v, sector.map_or(trivial, |s| s[v])))
            .collect::<Result<Vec<_>>>()?;
        Ok(OperatorChain { factors })
    }

    /// Strong-coupling vacuum: `|000>` on every link and the Dirac sea
    /// (even vertices empty, odd vertices filled).
    pub fn vacuum(&self) -> Result<Vec<C64>> {
        let mut factors: Vec<Vec<C64>> = Vec::new();
        if self.has_matter() {
            for v in 0..self.lattice.num_vertices() {
                let space = self.vertex_space(v);
                let mut f = vec![ZERO; space.dim()];
                f[if self.vertex_parity(v) == 1 { space.full() } else { space.empty() }] = ONE;
                factors.push(f);
            }
        }
        let singlet = self
            .link_space
            .singlet_index()
            .ok_or_else(|| Error::InvalidModel("catalog has no trivial irrep".into()))?;
        let mut link_rep = vec![ZERO; self.link_space.dim()];
        link_rep[singlet] = ONE;
        let link_vec = match self.link_basis {
            Basis::Rep => link_rep,
            Basis::Group => {
                let f = self.link_space.fourier.as_ref().expect("group basis has a Fourier matrix");
                (0..f.nrows()).map(|g| f[(g, singlet)]).collect()
            }
        };
        factors.extend(std::iter::repeat_n(link_vec, self.links.len()));
        Ok(factors.iter().fold(vec![ONE], |acc, f| {
            let mut out = Vec::with_capacity(acc.len() * f.len());
            for a in &acc {
                out.extend(f.iter().map(|b| a * b));
            }
            out
        }))
    }

    /// Fourier transform on every link, mapping rep-basis vectors to
    /// group-basis vectors (or back, with `inverse`).
    pub fn link_fourier(&self, inverse: bool) -> Result<OperatorChain> {
        let f = self
            .link_space
            .fourier
            .as_ref()
            .ok_or(Error::RequiresFinite("link_fourier"))?;
        let f = if inverse { f.adjoint() } else { f.clone() };
        let m = SparseMatrix::from_dense(&f);
        let factors = (0..self.links.len())
            .map(|l| OperatorSum::single(self.basis.clone(), vec![self.link_factor(l)], m.clone(), Vec::new()))
            .collect();
        Ok(OperatorChain { factors })
    }
}

/// Product of operators, applied first to last. Per-vertex projectors commute,
/// so for them the order is immaterial.
#[derive(Clone, Debug)]
pub struct OperatorChain {
    pub factors: Vec<OperatorSum>,
}

impl OperatorChain {
    pub fn assemble(&self) -> SparseMatrix {
        let mut it = self.factors.iter().map(OperatorSum::assemble);
        let Some(first) = it.next() else {
            return SparseMatrix::identity(self.dim());
        };
        it.fold(first, |acc, m| m.matmul(&acc))
    }
}

impl LinearMap for OperatorChain {
    fn dim(&self) -> usize {
        self.factors.first().map_or(1, |f| f.basis.dim)
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.factors.iter().fold(x.to_vec(), |v, p| p.apply(&v))
    }
}

//! Fermionic matter on one vertex.
//!
//! A vertex carries one mode per row of the fundamental irrep. Basis states
//! are occupation bitstrings in increasing binary order, with mode 0 as the
//! most significant bit: for two modes the order is `|00>, |01>, |10>, |11>`.
//! `psi_dagger(a)` carries the sign `(-1)^(occupied modes below a)`, so the
//! state with occupied set `a1 < a2 < ...` is `psi+_{a1} psi+_{a2} ... |0>`.

use crate::error::{Error, Result};
use crate::group::{GroupCatalogEntry, GroupElement, GroupKind, LieGroup};
use crate::linalg::{exp_i_hermitian, log_unitary, real, CMatrix, C64, ONE};
use crate::sparse::SparseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexFock {
    pub n_modes: usize,
    /// Sublattice parity `N`: 0 on even vertices, 1 on odd ones.
    pub parity: u8,
}

impl VertexFock {
    pub fn new(n_modes: usize, parity: u8) -> Self {
        assert!(n_modes <= 16, "vertex with {n_modes} modes is too large");
        Self {
            n_modes,
            parity: parity & 1,
        }
    }

    pub fn for_catalog(entry: &GroupCatalogEntry, parity: u8) -> Self {
        Self::new(entry.fundamental_irrep().dim, parity)
    }

    pub fn dim(&self) -> usize {
        1 << self.n_modes
    }

    #[inline]
    pub fn bit(&self, a: usize) -> usize {
        1 << (self.n_modes - 1 - a)
    }

    pub fn occupied(&self, state: usize, a: usize) -> bool {
        state & self.bit(a) != 0
    }

    /// Occupied modes of a basis state, ascending.
    pub fn modes(&self, state: usize) -> Vec<usize> {
        (0..self.n_modes).filter(|&a| self.occupied(state, a)).collect()
    }

    pub fn state_of(&self, modes: &[usize]) -> usize {
        modes.iter().fold(0, |s, &a| s | self.bit(a))
    }

    pub fn empty(&self) -> usize {
        0
    }

    pub fn full(&self) -> usize {
        self.dim() - 1
    }

    fn check_mode(&self, a: usize) -> Result<()> {
        if a >= self.n_modes {
            return Err(Error::ModeOutOfRange {
                index: a,
                n_modes: self.n_modes,
            });
        }
        Ok(())
    }

    /// Sign picked up by an operator on mode `a`: parity of the modes below it.
    pub fn sign_below(&self, state: usize, a: usize) -> f64 {
        let below = (0..a).filter(|&b| self.occupied(state, b)).count();
        if below % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn psi_dagger(&self, a: usize) -> Result<SparseMatrix> {
        self.check_mode(a)?;
        let trip = (0..self.dim())
            .filter(|&s| !self.occupied(s, a))
            .map(|s| (s | self.bit(a), s, real(self.sign_below(s, a))))
            .collect();
        Ok(SparseMatrix::from_triplets(self.dim(), self.dim(), trip))
    }

    pub fn psi(&self, a: usize) -> Result<SparseMatrix> {
        Ok(self.psi_dagger(a)?.adjoint())
    }

    /// `psi+ M psi = sum_ab M_ab psi+_a psi_b`.
    pub fn one_body(&self, m: &CMatrix) -> SparseMatrix {
        let mut out = SparseMatrix::zeros(self.dim(), self.dim());
        for a in 0..self.n_modes {
            for b in 0..self.n_modes {
                if m[(a, b)].norm() > 0.0 {
                    let term = self.psi_dagger(a).unwrap().matmul(&self.psi(b).unwrap());
                    out = out.axpy(m[(a, b)], &term);
                }
            }
        }
        out
    }

    pub fn number(&self) -> SparseMatrix {
        let diag: Vec<C64> = (0..self.dim()).map(|s| real(s.count_ones() as f64)).collect();
        SparseMatrix::from_diagonal(&diag)
    }

    /// Diagonal `(-1)^(number of occupied modes)`, used for Jordan-Wigner strings.
    pub fn parity_operator(&self) -> SparseMatrix {
        let diag: Vec<C64> = (0..self.dim())
            .map(|s| if s.count_ones() % 2 == 0 { ONE } else { -ONE })
            .collect();
        SparseMatrix::from_diagonal(&diag)
    }

    /// The induced action of `d` on all occupation sectors,
    /// `<B|T|A> = det d[B, A]` for `|A| = |B|`.
    pub fn induced(&self, d: &CMatrix) -> SparseMatrix {
        let mut trip = Vec::new();
        for a in 0..self.dim() {
            let cols = self.modes(a);
            for b in 0..self.dim() {
                if b.count_ones() != a.count_ones() {
                    continue;
                }
                let rows = self.modes(b);
                let minor = CMatrix::from_fn(rows.len(), cols.len(), |i, j| d[(rows[i], cols[j])]);
                let det = if rows.is_empty() { ONE } else { minor.determinant() };
                trip.push((b, a, det));
            }
        }
        SparseMatrix::from_triplets(self.dim(), self.dim(), trip)
    }

    /// `Theta^Q_g`: the induced action of the fundamental `D(g)` times
    /// `det(D(g^-1))^N`.
    pub fn theta_q(&self, entry: &GroupCatalogEntry, g: &GroupElement) -> SparseMatrix {
        let d = entry.rep_matrix(entry.fundamental, g);
        self.induced(&d).scale(self.staggering_phase(entry, g))
    }

    /// `det(D(g^-1))^N`.
    pub fn staggering_phase(&self, entry: &GroupCatalogEntry, g: &GroupElement) -> C64 {
        if self.parity == 0 {
            ONE
        } else {
            entry.fundamental_det(&entry.inverse(g))
        }
    }

    /// `exp(i psi+ q psi) det(D(g^-1))^N` with `q = -i log D(g)`; agrees with
    /// [`Self::theta_q`] and serves as its cross-check.
    pub fn theta_q_exponential(&self, entry: &GroupCatalogEntry, g: &GroupElement) -> SparseMatrix {
        let q = log_unitary(&entry.rep_matrix(entry.fundamental, g));
        let gen = self.one_body(&q).to_dense();
        let u = exp_i_hermitian(&gen) * self.staggering_phase(entry, g);
        SparseMatrix::from_dense(&u)
    }

    /// Lie charges `Q_a = psi+ T_a psi - N tr(T_a)`, so that
    /// `Theta^Q(exp(i alpha.T)) = exp(i alpha.Q)`.
    pub fn charges(&self, entry: &GroupCatalogEntry) -> Result<Vec<SparseMatrix>> {
        entry.require_lie("charges")?;
        let f = entry.fundamental_irrep();
        Ok(f.generators
            .iter()
            .map(|t| {
                let shift = t.trace() * self.parity as f64;
                self.one_body(t).sub(&SparseMatrix::identity(self.dim()).scale(shift))
            })
            .collect())
    }

    /// `Q_a = psi+ (sigma_a / 2) psi`.
    pub fn charge_su2(&self, entry: &GroupCatalogEntry) -> Result<Vec<SparseMatrix>> {
        match entry.group {
            GroupKind::Lie(LieGroup::Su2 { .. }) if entry.fundamental_irrep().dim == 2 => self.charges(entry),
            _ => Err(Error::RequiresSu2("charge_su2")),
        }
    }

    /// Staggered Abelian charge `psi+ psi - (1 - (-1)^N) / 2`.
    pub fn charge_u1(&self) -> SparseMatrix {
        let shift = real(self.parity as f64);
        self.number().sub(&SparseMatrix::identity(self.dim()).scale(shift))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_builtin, GroupParams};
    use crate::linalg::{commutator, max_abs_diff, I, ZERO};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn d3() -> GroupCatalogEntry {
        build_builtin("D3", &GroupParams::new()).unwrap()
    }

    fn su2() -> GroupCatalogEntry {
        build_builtin("SU2_trunc", &[("J_max".to_string(), "1/2".to_string())].into_iter().collect()).unwrap()
    }

    #[test]
    fn canonical_anticommutators() {
        let v = VertexFock::new(3, 0);
        let id = SparseMatrix::identity(8);
        for a in 0..3 {
            for b in 0..3 {
                let (pa, pb) = (v.psi(a).unwrap(), v.psi(b).unwrap());
                let pdb = v.psi_dagger(b).unwrap();
                let anti = pa.matmul(&pdb).add(&pdb.matmul(&pa));
                let expect = if a == b { id.clone() } else { SparseMatrix::zeros(8, 8) };
                assert_eq!(anti.max_abs_diff(&expect), 0.0);
                assert_eq!(pa.matmul(&pb).add(&pb.matmul(&pa)).max_abs(), 0.0);
            }
        }
        assert!(matches!(v.psi(3), Err(Error::ModeOutOfRange { .. })));
    }

    #[test]
    fn creation_order_signs() {
        let v = VertexFock::new(2, 0);
        let vac = SparseMatrix::from_triplets(4, 1, vec![(0, 0, ONE)]);
        let one = v.psi_dagger(0).unwrap().matmul(&vac);
        assert_eq!(one.get(0b10, 0), ONE);
        let ab = v.psi_dagger(1).unwrap().matmul(&v.psi_dagger(0).unwrap()).matmul(&vac);
        let ba = v.psi_dagger(0).unwrap().matmul(&v.psi_dagger(1).unwrap()).matmul(&vac);
        assert_eq!(ab.get(3, 0), -ONE);
        assert_eq!(ba.get(3, 0), ONE);
    }

    #[test]
    fn d3_reflection_closed_form() {
        let e = d3();
        for parity in [0u8, 1] {
            let v = VertexFock::for_catalog(&e, parity);
            let t = v.theta_q(&e, &GroupElement::Finite(3));
            let sign = if parity == 0 { 1.0 } else { -1.0 };
            // (1 - 2 n_down) (-1)^N with the down mode at index 1
            let diag: Vec<C64> = (0..4)
                .map(|s| real(if v.occupied(s, 1) { -sign } else { sign }))
                .collect();
            assert_eq!(t.max_abs_diff(&SparseMatrix::from_diagonal(&diag)), 0.0);
        }
    }

    #[test]
    fn d3_group_law_and_full_vertex() {
        let e = d3();
        let spec = e.finite().unwrap().clone();
        for parity in [0u8, 1] {
            let v = VertexFock::for_catalog(&e, parity);
            let th: Vec<SparseMatrix> = (0..6).map(|g| v.theta_q(&e, &GroupElement::Finite(g))).collect();
            for g in 0..6 {
                for h in 0..6 {
                    assert!(th[g].matmul(&th[h]).max_abs_diff(&th[spec.mul[g][h]]) < 1e-12);
                }
                let gg = GroupElement::Finite(g);
                let expect = e.fundamental_det(&gg) * v.staggering_phase(&e, &gg);
                assert!((th[g].get(v.full(), v.full()) - expect).norm() < 1e-12);
                assert!(th[g].max_abs_diff(&v.theta_q_exponential(&e, &gg)) < 1e-10);
                for a in 0..2 {
                    let lhs = th[g].matmul(&v.psi_dagger(a).unwrap()).matmul(&th[g].adjoint());
                    let mut rhs = SparseMatrix::zeros(4, 4);
                    for b in 0..2 {
                        rhs = rhs.axpy(e.irreps[2].matrices[g][(b, a)], &v.psi_dagger(b).unwrap());
                    }
                    assert!(lhs.max_abs_diff(&rhs) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn su2_charges() {
        let e = su2();
        let v = VertexFock::for_catalog(&e, 1);
        let q = v.charge_su2(&e).unwrap();
        for qa in &q {
            for s in [v.empty(), v.full()] {
                assert!(qa.row(s).all(|(_, z)| z == ZERO));
                assert!((0..4).all(|r| qa.get(r, s) == ZERO));
            }
        }
        assert_eq!(q[2].get(0b10, 0b10), real(0.5));
        let d: Vec<CMatrix> = q.iter().map(|x| x.to_dense()).collect();
        assert!(max_abs_diff(&commutator(&d[0], &d[1]), &(&d[2] * I)) < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let g = e.random_element(&mut rng);
            let GroupElement::Lie(alpha) = &g else { unreachable!() };
            let mut gen = CMatrix::zeros(4, 4);
            for (x, qa) in alpha.iter().zip(&d) {
                gen += qa.scale(*x);
            }
            assert!(max_abs_diff(&exp_i_hermitian(&gen), &v.theta_q(&e, &g).to_dense()) < 1e-10);
        }
        let z = build_builtin("Z_N", &[("N".to_string(), "3".to_string())].into_iter().collect()).unwrap();
        assert!(matches!(v.charge_su2(&z), Err(Error::RequiresSu2(_))));
    }

    #[test]
    fn staggered_u1_charge() {
        assert_eq!(VertexFock::new(1, 0).charge_u1().get(0, 0), ZERO);
        assert_eq!(VertexFock::new(1, 1).charge_u1().get(0, 0), -ONE);
        assert_eq!(VertexFock::new(1, 1).charge_u1().get(1, 1), ZERO);
        let e = build_builtin("U1_trunc", &[("P".to_string(), "1".to_string())].into_iter().collect()).unwrap();
        let v = VertexFock::for_catalog(&e, 1);
        assert_eq!(v.charges(&e).unwrap()[0], v.charge_u1());
    }
}

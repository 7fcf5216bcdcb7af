//! Invariant suite run against a configured model.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clebsch_gordan::{cg, decompose, verify_cg};
use crate::error::Result;
use crate::group::{validate, GroupCatalogEntry, GroupElement, GroupKind};
use crate::lattice::{norm, GlobalBasis, LinearMap, Model, OperatorSum, TermKind};
use crate::link::{Basis, LinkOperator, LinkSpace, Side};
use crate::linalg::{c, commutator, exp_i_hermitian, max_abs_diff, CMatrix, C64, I, ZERO};
use crate::matter::VertexFock;
use crate::report::{CheckResult, Report, DEFAULT_TOL};
use crate::sparse::SparseMatrix;

const EXACT_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Random vectors per operator identity on the global space.
    pub probes: usize,
    /// Sampled elements for Lie groups.
    pub lie_samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            probes: 20,
            lie_samples: 8,
        }
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Normalized seeded random vectors.
pub fn probe_vectors(dim: usize, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let mut r = rng(seed, 1);
    (0..count)
        .map(|_| {
            let mut v: Vec<C64> = (0..dim)
                .map(|_| c(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
                .collect();
            let n = norm(&v);
            v.iter_mut().for_each(|z| *z /= n);
            v
        })
        .collect()
}

fn diff_norm(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// `max_x |[A, B] x|` over the probes.
pub fn probe_commutator(a: &dyn LinearMap, b: &dyn LinearMap, probes: &[Vec<C64>]) -> f64 {
    probes
        .iter()
        .map(|x| diff_norm(&a.apply(&b.apply(x)), &b.apply(&a.apply(x))))
        .fold(0.0, f64::max)
}

/// `max_{x,y} |<x|Hy> - <Hx|y>|` over consecutive probe pairs.
pub fn probe_hermiticity(h: &dyn LinearMap, probes: &[Vec<C64>]) -> f64 {
    let images: Vec<Vec<C64>> = probes.iter().map(|x| h.apply(x)).collect();
    (0..probes.len())
        .map(|i| {
            let j = (i + 1) % probes.len();
            let a = crate::lattice::dot(&probes[i], &images[j]);
            let b = crate::lattice::dot(&images[i], &probes[j]);
            (a - b).norm()
        })
        .fold(0.0, f64::max)
}

fn sample_elements(entry: &GroupCatalogEntry, opts: &VerifyOptions, stream: u64) -> Vec<GroupElement> {
    match &entry.group {
        GroupKind::Finite(_) => entry.elements(),
        GroupKind::Lie(_) => {
            let mut r = rng(opts.seed, stream);
            (0..opts.lie_samples).map(|_| entry.random_element(&mut r)).collect()
        }
    }
}

fn alpha(g: &GroupElement) -> &[f64] {
    match g {
        GroupElement::Lie(a) => a,
        GroupElement::Finite(_) => &[],
    }
}

fn exp_sum(gens: &[CMatrix], a: &[f64]) -> CMatrix {
    let n = gens[0].nrows();
    let mut h = CMatrix::zeros(n, n);
    for (x, g) in a.iter().zip(gens) {
        h += g.scale(*x);
    }
    exp_i_hermitian(&h)
}

/// Structure constants of the Lie algebra: `[X_a, X_b] = i eps_abc X_c` for
/// SU(2), commuting for U(1).
fn algebra_residual(x: &[CMatrix]) -> f64 {
    if x.len() < 3 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for (a, b, cc) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        worst = worst.max(max_abs_diff(&commutator(&x[a], &x[b]), &(&x[cc] * I)));
    }
    worst
}

pub fn verify_group(entry: &GroupCatalogEntry) -> Report {
    let mut out = Report::default();
    for chk in validate(entry).checks {
        out.push(CheckResult {
            name: format!("group.{}", chk.name),
            ..chk
        });
    }
    out
}

/// Every coupling `J x j -> K` used by the connection `U^j`.
pub fn verify_clebsch_gordan(entry: &GroupCatalogEntry, j: usize) -> Result<Report> {
    let mut out = Report::default();
    for big_j in 0..entry.irreps.len() {
        for t in decompose(entry, big_j, j).terms {
            let Some(k) = t.irrep else { continue };
            let tensor = cg(entry, big_j, j, k)?;
            let name = format!(
                "cg[{} x {} -> {}]",
                entry.irreps[big_j].label, entry.irreps[j].label, entry.irreps[k].label
            );
            out.check(format!("{name}.orthonormal"), tensor.orthonormality_residual(), DEFAULT_TOL);
            out.check(format!("{name}.intertwiner"), verify_cg(entry, &tensor), DEFAULT_TOL);
        }
    }
    Ok(out)
}

pub fn verify_links(space: &LinkSpace, irreps: &[usize], opts: &VerifyOptions) -> Result<Report> {
    let entry = &space.catalog;
    let mut out = Report::default();
    let elements = sample_elements(entry, opts, 2);
    let d = space.dim();
    let dense = |o: &LinkOperator| o.matrix.to_dense();
    let mut law = [0.0f64; 2];
    let mut unitary: f64 = 0.0;
    let mut lr: f64 = 0.0;
    for g in &elements {
        let (lg, rg) = (dense(&space.theta_left(g)), dense(&space.theta_right(g)));
        unitary = unitary
            .max(max_abs_diff(&(lg.adjoint() * &lg), &CMatrix::identity(d, d)))
            .max(max_abs_diff(&(rg.adjoint() * &rg), &CMatrix::identity(d, d)));
        for h in &elements {
            let gh = entry.multiply(g, h);
            for (k, side) in [Side::Left, Side::Right].into_iter().enumerate() {
                let prod = dense(&space.theta(side, g)) * dense(&space.theta(side, h));
                law[k] = law[k].max(max_abs_diff(&prod, &dense(&space.theta(side, &gh))));
            }
            let rh = dense(&space.theta_right(h));
            lr = lr.max(max_abs_diff(&(&lg * &rh), &(&rh * &lg)));
        }
    }
    out.check("link.theta_left.group_law", law[0], EXACT_TOL);
    out.check("link.theta_right.group_law", law[1], EXACT_TOL);
    out.check("link.theta.unitary", unitary, EXACT_TOL);
    out.check("link.theta.left_right_commute", lr, EXACT_TOL);

    if space.supports(Basis::Group) {
        let mut perm: f64 = 0.0;
        for g in 0..entry.order().unwrap_or(0) {
            for side in [Side::Left, Side::Right] {
                let rep = space.theta(side, &GroupElement::Finite(g));
                let conj = space.to_group_basis(&rep)?;
                let exact = space.theta_group_basis(g, side)?;
                perm = perm.max(conj.matrix.max_abs_diff(&exact.matrix));
            }
        }
        out.check("link.theta.fourier_translation", perm, EXACT_TOL);
        for &j in irreps {
            let rep = space.u_matrix_rep(j)?;
            let grp = space.u_matrix_group(j)?;
            let mut worst: f64 = 0.0;
            for m in 0..rep.dim() {
                for n in 0..rep.dim() {
                    let conj = space.to_group_basis(rep.get(m, n))?;
                    worst = worst.max(conj.matrix.max_abs_diff(&grp.get(m, n).matrix));
                }
            }
            out.check(format!("link.u[{}].group_diagonal", entry.irreps[j].label), worst, EXACT_TOL);
        }
    }

    if let GroupKind::Lie(lie) = &entry.group {
        let (left, right) = space.generators()?;
        let l: Vec<CMatrix> = left.iter().map(dense).collect();
        let r: Vec<CMatrix> = right.iter().map(dense).collect();
        out.check("link.generators.left_algebra", algebra_residual(&l), EXACT_TOL);
        out.check("link.generators.right_algebra", algebra_residual(&r), EXACT_TOL);
        let mut lr: f64 = 0.0;
        for a in &l {
            for b in &r {
                lr = lr.max(commutator(a, b).iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
        out.check("link.generators.left_right_commute", lr, EXACT_TOL);
        let sq = |x: &[CMatrix]| x.iter().fold(CMatrix::zeros(d, d), |acc, m| acc + m * m);
        out.check("link.generators.casimir_equal", max_abs_diff(&sq(&l), &sq(&r)), EXACT_TOL);
        let mut exp_res: f64 = 0.0;
        for g in &elements {
            exp_res = exp_res
                .max(max_abs_diff(&exp_sum(&l, alpha(g)), &dense(&space.theta_left(g))))
                .max(max_abs_diff(&exp_sum(&r, alpha(g)), &dense(&space.theta_right(g))));
        }
        out.check("link.generators.exponentiate_to_theta", exp_res, DEFAULT_TOL);
        if lie.algebra_dim() == 1 {
            out.check("link.generators.abelian_right_is_minus_left", max_abs_diff(&r[0], &(-&l[0])), EXACT_TOL);
        }
    }

    for &j in irreps {
        let diag = space.trace_diagnostic(j)?;
        if let Some(res) = diag.residual {
            out.check(format!("link.u[{}].trace_defect", entry.irreps[j].label), res, EXACT_TOL);
        }
    }
    Ok(out)
}

pub fn verify_matter(entry: &GroupCatalogEntry, opts: &VerifyOptions) -> Result<Report> {
    let mut out = Report::default();
    let elements = sample_elements(entry, opts, 3);
    let fund = entry.fundamental_irrep().dim;
    for parity in [0u8, 1] {
        let v = VertexFock::for_catalog(entry, parity);
        let dim = v.dim();
        let tag = format!("matter[N={parity}]");

        let mut anti: f64 = 0.0;
        for a in 0..fund {
            for b in 0..fund {
                let (pa, pdb) = (v.psi(a)?, v.psi_dagger(b)?);
                let expect = if a == b { SparseMatrix::identity(dim) } else { SparseMatrix::zeros(dim, dim) };
                anti = anti.max(pa.matmul(&pdb).add(&pdb.matmul(&pa)).max_abs_diff(&expect));
            }
        }
        out.check(format!("{tag}.anticommutators"), anti, 0.0);

        let thetas: Vec<SparseMatrix> = elements.iter().map(|g| v.theta_q(entry, g)).collect();
        let mut law: f64 = 0.0;
        let mut full: f64 = 0.0;
        let mut cov: f64 = 0.0;
        for (gi, g) in elements.iter().enumerate() {
            for (hi, h) in elements.iter().enumerate() {
                let gh = v.theta_q(entry, &entry.multiply(g, h));
                law = law.max(thetas[gi].matmul(&thetas[hi]).max_abs_diff(&gh));
            }
            let expect = entry.fundamental_det(g) * v.staggering_phase(entry, g);
            let t = &thetas[gi];
            let col: Vec<(usize, C64)> = (0..dim).map(|r| (r, t.get(r, v.full()))).collect();
            full = full.max(col.iter().fold(0.0, |acc, &(r, z)| {
                let target = if r == v.full() { expect } else { ZERO };
                acc.max((z - target).norm())
            }));
            let d = entry.rep_matrix(entry.fundamental, g);
            for a in 0..fund {
                let lhs = t.matmul(&v.psi_dagger(a)?).matmul(&t.adjoint());
                let mut rhs = SparseMatrix::zeros(dim, dim);
                for b in 0..fund {
                    rhs = rhs.axpy(d[(b, a)], &v.psi_dagger(b)?);
                }
                cov = cov.max(lhs.max_abs_diff(&rhs));
            }
        }
        out.check(format!("{tag}.theta_q.group_law"), law, EXACT_TOL);
        out.check(format!("{tag}.theta_q.full_vertex_eigenvalue"), full, EXACT_TOL);
        out.check(format!("{tag}.theta_q.covariance"), cov, EXACT_TOL);
        let empty_fixed = thetas
            .iter()
            .zip(&elements)
            .map(|(t, g)| (t.get(v.empty(), v.empty()) - v.staggering_phase(entry, g)).norm())
            .fold(0.0, f64::max);
        out.check(format!("{tag}.theta_q.empty_vertex_eigenvalue"), empty_fixed, EXACT_TOL);

        if entry.lie().is_some() {
            let q: Vec<CMatrix> = v.charges(entry)?.iter().map(SparseMatrix::to_dense).collect();
            out.check(format!("{tag}.charges.algebra"), algebra_residual(&q), EXACT_TOL);
            let mut exp_res: f64 = 0.0;
            for (g, t) in elements.iter().zip(&thetas) {
                exp_res = exp_res.max(max_abs_diff(&exp_sum(&q, alpha(g)), &t.to_dense()));
            }
            out.check(format!("{tag}.charges.exponentiate_to_theta_q"), exp_res, DEFAULT_TOL);
            let kills = q
                .iter()
                .map(|m| {
                    let col = |s: usize| (0..dim).map(move |r| m[(r, s)].norm()).fold(0.0, f64::max);
                    col(v.empty()).max(col(v.full()))
                })
                .fold(0.0, f64::max);
            if entry.fundamental_irrep().generators.iter().all(|t| t.trace().norm() == 0.0) {
                out.check(format!("{tag}.charges.annihilate_empty_and_full"), kills, 0.0);
            }
        }
    }
    Ok(out)
}

/// The Lie Gauss generators at `v` as dense matrices over the star factors,
/// in the order used by [`Model::gauss_operator`].
fn local_generators(model: &Model, v: usize) -> Result<Vec<CMatrix>> {
    let (out_links, in_links) = model.lattice.star(v);
    let mut dims = Vec::new();
    if model.has_matter() {
        dims.push(model.basis.dims[model.vertex_factor(v)?]);
    }
    dims.extend(std::iter::repeat_n(model.link_space.dim(), out_links.len() + in_links.len()));
    let local = GlobalBasis::new(dims);
    let (left, right) = model.link_space.generators()?;
    let charges = if model.has_matter() {
        Some(model.vertex_space(v).charges(model.catalog())?)
    } else {
        None
    };
    let offset = usize::from(model.has_matter());
    let mut out = Vec::new();
    for a in 0..left.len() {
        let mut g = OperatorSum::new(local.clone());
        if let Some(q) = &charges {
            g.push(vec![0], q[a].clone(), Vec::new());
        }
        for k in 0..out_links.len() {
            g.push(vec![offset + k], left[a].matrix.clone(), Vec::new());
        }
        for k in 0..in_links.len() {
            g.push(vec![offset + out_links.len() + k], right[a].matrix.clone(), Vec::new());
        }
        out.push(g.assemble().to_dense());
    }
    Ok(out)
}

fn term_name(k: TermKind) -> String {
    serde_json::to_value(k)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

/// Hermiticity of every Hamiltonian term and its commutator with every
/// Gauss-law operator (all elements for finite groups, seeded samples and the
/// generators for Lie groups), on seeded random probes.
pub fn gauge_invariance(model: &Model, opts: &VerifyOptions) -> Result<Report> {
    let mut out = Report::default();
    let entry = model.catalog();
    let probes = probe_vectors(model.dim(), opts.probes, opts.seed);
    let h = model.hamiltonian()?;
    for (kind, term) in &h.terms {
        out.check(format!("model.{}.hermitian", term_name(*kind)), probe_hermiticity(term, &probes), DEFAULT_TOL);
    }

    // H_k x is shared across all transformations
    let elements = sample_elements(entry, opts, 4);
    let term_images: Vec<Vec<Vec<C64>>> = h
        .terms
        .iter()
        .map(|(_, t)| probes.iter().map(|x| t.apply(x)).collect())
        .collect();
    let mut gauss_res = vec![0.0f64; h.terms.len()];
    let mut unitary: f64 = 0.0;
    let dim = model.dim();
    let (mut tx, mut lhs, mut rhs) = (vec![ZERO; dim], vec![ZERO; dim], vec![ZERO; dim]);
    for v in 0..model.lattice.num_vertices() {
        for g in &elements {
            let theta = model.gauss_operator(v, g)?;
            for (p, x) in probes.iter().enumerate() {
                theta.apply_into(x, &mut tx);
                unitary = unitary.max((norm(&tx) - 1.0).abs());
                for (k, (_, term)) in h.terms.iter().enumerate() {
                    term.apply_into(&tx, &mut lhs);
                    theta.apply_into(&term_images[k][p], &mut rhs);
                    gauss_res[k] = gauss_res[k].max(diff_norm(&lhs, &rhs));
                }
            }
        }
    }
    for (k, (kind, _)) in h.terms.iter().enumerate() {
        out.check(format!("model.{}.gauss_invariant", term_name(*kind)), gauss_res[k], DEFAULT_TOL);
    }
    out.check("model.gauss.unitary", unitary, DEFAULT_TOL);

    if entry.lie().is_some() {
        let mut herm: f64 = 0.0;
        let mut comm = vec![0.0f64; h.terms.len()];
        for v in 0..model.lattice.num_vertices() {
            for gen in model.gauss_generators(v)? {
                herm = herm.max(probe_hermiticity(&gen, &probes[..probes.len().min(2)]));
                for (k, (_, term)) in h.terms.iter().enumerate() {
                    comm[k] = comm[k].max(probe_commutator(&gen, term, &probes));
                }
            }
        }
        out.check("model.generators.hermitian", herm, DEFAULT_TOL);
        for (k, (kind, _)) in h.terms.iter().enumerate() {
            out.check(format!("model.{}.generator_invariant", term_name(*kind)), comm[k], DEFAULT_TOL);
        }
    }
    Ok(out)
}

pub fn verify_model(model: &Model, opts: &VerifyOptions) -> Result<Report> {
    let mut out = gauge_invariance(model, opts)?;
    let entry = model.catalog();
    let probes = probe_vectors(model.dim(), opts.probes.min(4), opts.seed);
    let h = model.hamiltonian()?;
    let elements = sample_elements(entry, opts, 4);
    let nv = model.lattice.num_vertices();

    // group law and locality on a few probes
    let few = &probes[..probes.len().min(2)];
    let mut law: f64 = 0.0;
    let law_elements: Vec<&GroupElement> = elements.iter().take(6).collect();
    for g in &law_elements {
        for hh in &law_elements {
            let tg = model.gauss_operator(0, g)?;
            let th = model.gauss_operator(0, hh)?;
            let tgh = model.gauss_operator(0, &entry.multiply(g, hh))?;
            for x in few {
                law = law.max(diff_norm(&tg.apply(&th.apply(x)), &tgh.apply(x)));
            }
        }
    }
    out.check("model.gauss.group_law", law, DEFAULT_TOL);
    if nv > 1 {
        let g = elements.last().expect("elements");
        let a = model.gauss_operator(0, g)?;
        let b = model.gauss_operator(1, g)?;
        out.check("model.gauss.vertices_commute", probe_commutator(&a, &b, few), DEFAULT_TOL);
    }

    if entry.lie().is_some() {
        let mut exp_res: f64 = 0.0;
        for v in 0..nv {
            let gens = local_generators(model, v)?;
            for g in &elements {
                let theta = model.gauss_operator(v, g)?;
                let t = theta.terms[0].matrix.to_dense();
                exp_res = exp_res.max(max_abs_diff(&exp_sum(&gens, alpha(g)), &t));
            }
        }
        out.check("model.generators.exponentiate_to_gauss", exp_res, DEFAULT_TOL);
        let vac = model.vacuum()?;
        let mut vac_res: f64 = 0.0;
        for v in 0..nv {
            for gen in model.gauss_generators(v)? {
                vac_res = vac_res.max(norm(&gen.apply(&vac)));
            }
        }
        out.check("model.vacuum.gauss_invariant", vac_res, DEFAULT_TOL);
    }

    if entry.is_finite() && entry.trivial_irrep().is_some() {
        let p = model.physical_projector(None)?;
        let mut idem: f64 = 0.0;
        for x in few {
            let px = p.apply(x);
            idem = idem.max(diff_norm(&p.apply(&px), &px));
        }
        out.check("model.projector.idempotent", idem, DEFAULT_TOL);
        out.check("model.projector.commutes_with_h", probe_commutator(&p, &h, few), DEFAULT_TOL);
        let vac = model.vacuum()?;
        out.check("model.vacuum.physical", diff_norm(&p.apply(&vac), &vac), DEFAULT_TOL);
    }

    if model.has_matter() && !model.plaquettes.is_empty() {
        if let Some(t) = h.term(TermKind::Tunneling) {
            let w = model.wilson_loop(0)?;
            out.check("model.plaquette.commutes_with_tunneling", probe_commutator(&w, t, few), DEFAULT_TOL);
        }
    }

    if model.has_matter() && model.params.mass != 0.0 {
        let mass = model.mass_term()?;
        let mut worst: f64 = 0.0;
        for v in 0..nv {
            let mut digits = vec![0; model.basis.num_factors()];
            digits[model.vertex_factor(v)?] = model.vertex_space(v).state_of(&[0]);
            let idx = model.basis.encode(&digits);
            let sign = if model.params.staggered && model.lattice.parity(v) == 1 { -1.0 } else { 1.0 };
            worst = worst.max((mass.entry(idx, idx).re - sign * model.params.mass).abs());
        }
        out.check("model.mass.staggered_sign", worst, EXACT_TOL);
    }

    if model.link_space.supports(Basis::Group) {
        out.extend(compare_bases(model, &probes[..probes.len().min(4)])?);
    }
    Ok(out)
}

/// Builds the model in the other link basis and compares every term after
/// Fourier conjugation; in the group basis the magnetic term is also
/// compared against its conjugacy-class form.
fn compare_bases(model: &Model, probes: &[Vec<C64>]) -> Result<Report> {
    let mut out = Report::default();
    let other_basis = match model.link_basis {
        Basis::Rep => Basis::Group,
        Basis::Group => Basis::Rep,
    };
    let other = Model::new(model.catalog().clone(), model.lattice.clone(), model.params.clone(), other_basis)?;
    let (rep, grp) = match model.link_basis {
        Basis::Rep => (model, &other),
        Basis::Group => (&other, model),
    };
    let f = rep.link_fourier(false)?;
    let hr = rep.hamiltonian()?;
    let hg = grp.hamiltonian()?;
    for ((kind, tr), (_, tg)) in hr.terms.iter().zip(&hg.terms) {
        let worst = probes
            .iter()
            .map(|x| diff_norm(&tg.apply(&f.apply(x)), &f.apply(&tr.apply(x))))
            .fold(0.0, f64::max);
        out.check(format!("model.{}.rep_group_agree", term_name(*kind)), worst, DEFAULT_TOL);
    }
    if let Some(mag) = hg.term(TermKind::Magnetic) {
        let class = grp.magnetic_class_form()?;
        let worst = probes
            .iter()
            .map(|x| diff_norm(&mag.apply(x), &class.apply(x)))
            .fold(0.0, f64::max);
        out.check("model.magnetic.class_form", worst, DEFAULT_TOL);
    }
    Ok(out)
}

/// Group, Clebsch-Gordan, link, matter and model checks for one model.
pub fn verify_all(model: &Model, opts: &VerifyOptions) -> Result<Report> {
    let entry = model.catalog();
    let mut irreps = vec![entry.fundamental];
    if model.magnetic_irrep != entry.fundamental {
        irreps.push(model.magnetic_irrep);
    }
    let mut out = verify_group(entry);
    for &j in &irreps {
        out.extend(verify_clebsch_gordan(entry, j)?);
    }
    out.extend(verify_links(&model.link_space, &irreps, opts)?);
    if model.has_matter() {
        out.extend(verify_matter(entry, opts)?);
    }
    out.extend(verify_model(model, opts)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::parse_group_ref;
    use crate::lattice::{LatticeSpec, ModelParams};

    #[test]
    fn su2_chain_passes_everything() {
        let params = ModelParams {
            mass: 0.6,
            ..ModelParams::default()
        };
        let m = Model::new(parse_group_ref("SU2:J_max=1/2").unwrap(), LatticeSpec::open(2, 1, true), params, Basis::Rep).unwrap();
        let r = verify_all(&m, &VerifyOptions::default()).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.get("model.tunneling.generator_invariant").is_some());
    }

    #[test]
    fn z3_square_passes_and_fault_is_caught() {
        let params = ModelParams {
            mass: 0.3,
            ..ModelParams::default()
        };
        let m = Model::new(parse_group_ref("Z3").unwrap(), LatticeSpec::open(2, 2, true), params.clone(), Basis::Group).unwrap();
        let r = verify_all(&m, &VerifyOptions::default()).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.get("model.magnetic.class_form").unwrap().passed);

        let faulty = ModelParams {
            drop_hermitian_conjugate: true,
            ..params
        };
        let m = Model::new(parse_group_ref("Z3").unwrap(), LatticeSpec::open(2, 2, true), faulty, Basis::Rep).unwrap();
        let r = verify_model(&m, &VerifyOptions::default()).unwrap();
        assert!(!r.get("model.tunneling.hermitian").unwrap().passed);
        assert!(!r.get("model.magnetic.hermitian").unwrap().passed);
    }

    #[test]
    fn u1_chain_generators() {
        let m = Model::new(parse_group_ref("U1:P=1").unwrap(), LatticeSpec::open(2, 1, true), ModelParams::default(), Basis::Rep).unwrap();
        let r = verify_all(&m, &VerifyOptions::default()).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.get("link.generators.abelian_right_is_minus_left").unwrap().passed);
    }
}

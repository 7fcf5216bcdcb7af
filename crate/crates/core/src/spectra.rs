//! Low-lying spectra, degeneracies and expectation values.

use log::{debug, warn};
use nalgebra::SymmetricEigen;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{dot, norm, LinearMap, Model, TermKind, TermSet};
use crate::link::Basis;
use crate::linalg::{c, projector_range, real, CMatrix, C64, ZERO};

pub const DENSE_LIMIT: usize = 4096;
pub const DEGENERACY_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Iterative,
}

#[derive(Clone, Debug)]
pub struct EigenOptions {
    pub seed: u64,
    pub tol: f64,
    pub max_iterations: usize,
    /// Largest dimension solved by full diagonalization.
    pub dense_limit: usize,
    pub force: Option<Method>,
    pub keep_vectors: bool,
    /// Krylov basis size before a restart.
    pub krylov_dim: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            tol: 1e-8,
            max_iterations: 5000,
            dense_limit: DENSE_LIMIT,
            force: None,
            keep_vectors: false,
            krylov_dim: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Option<Vec<Vec<C64>>>,
    pub residuals: Vec<f64>,
    pub method: Method,
    pub seed: u64,
    pub iterations: usize,
}

impl SpectrumResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn levels(&self, tol: f64) -> Vec<Level> {
        degeneracies(&self.eigenvalues, tol)
    }
}

/// Groups ascending values whose distance to the first of their group is
/// within `tol`.
pub fn degeneracies(values: &[f64], tol: f64) -> Vec<Level> {
    let mut out: Vec<Level> = Vec::new();
    let mut first = f64::NAN;
    for &v in values {
        match out.last_mut() {
            Some(level) if (v - first).abs() <= tol => level.multiplicity += 1,
            _ => {
                first = v;
                out.push(Level {
                    energy: v,
                    multiplicity: 1,
                })
            }
        }
    }
    out
}

/// Dense matrix of a linear map, column by column.
pub fn dense_matrix(h: &dyn LinearMap) -> CMatrix {
    let n = h.dim();
    let mut m = CMatrix::zeros(n, n);
    let mut e = vec![ZERO; n];
    for j in 0..n {
        e[j] = real(1.0);
        let col = h.apply(&e);
        e[j] = ZERO;
        for (i, z) in col.into_iter().enumerate() {
            m[(i, j)] = z;
        }
    }
    m
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (p, q) in y.iter_mut().zip(x) {
        *p += a * q;
    }
}

fn scale(x: &mut [C64], s: f64) {
    for z in x.iter_mut() {
        *z *= s;
    }
}

/// Two passes of Gram-Schmidt against `basis`.
fn orthogonalize(v: &mut [C64], basis: &[Vec<C64>]) {
    for _ in 0..2 {
        for b in basis {
            let overlap = dot(b, v);
            axpy(v, -overlap, b);
        }
    }
}

fn residual_norm(h: &dyn LinearMap, v: &[C64], lambda: f64) -> f64 {
    let mut r = h.apply(v);
    axpy(&mut r, real(-lambda), v);
    norm(&r)
}

/// Probes `<x|Hy> = <Hx|y>^*` on two seeded vectors.
pub fn hermiticity_probe(h: &dyn LinearMap, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4845_524d);
    let x = random_vector(&mut rng, h.dim());
    let y = random_vector(&mut rng, h.dim());
    let a = dot(&x, &h.apply(&y));
    let b = dot(&h.apply(&x), &y);
    (a - b).norm() / (1.0 + a.norm())
}

/// The `k` lowest eigenpairs of a Hermitian map.
pub fn eigensolve(h: &dyn LinearMap, k: usize, opts: &EigenOptions) -> Result<SpectrumResult> {
    let n = h.dim();
    let k = clamp_k(k, n);
    let method = opts
        .force
        .unwrap_or(if n <= opts.dense_limit { Method::Dense } else { Method::Iterative });
    match method {
        Method::Dense => {
            let m = dense_matrix(h);
            let herm = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if herm > 1e-10 {
                return Err(Error::NotHermitian(herm));
            }
            let (vals, vecs) = dense_eigen(&m, k);
            finish(h, vals, vecs, Method::Dense, 0, opts)
        }
        Method::Iterative => {
            let herm = hermiticity_probe(h, opts.seed);
            if herm > 1e-10 {
                return Err(Error::NotHermitian(herm));
            }
            let (vals, vecs, iterations) = lanczos(h, None, k, opts)?;
            finish(h, vals, vecs, Method::Iterative, iterations, opts)
        }
    }
}

/// The `k` lowest eigenpairs of `H` restricted to the range of the
/// projector `p`, which must commute with `H`.
pub fn sector_eigensolve(h: &dyn LinearMap, p: &dyn LinearMap, k: usize, opts: &EigenOptions) -> Result<SpectrumResult> {
    let n = h.dim();
    let method = opts
        .force
        .unwrap_or(if n <= opts.dense_limit { Method::Dense } else { Method::Iterative });
    match method {
        Method::Dense => {
            let pm = dense_matrix(p);
            let q = projector_range(&pm, 1e-8);
            let k = clamp_k(k, q.ncols());
            if k == 0 {
                return finish(h, Vec::new(), Vec::new(), Method::Dense, 0, opts);
            }
            let hm = dense_matrix(h);
            let herm = (&hm - hm.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if herm > 1e-10 {
                return Err(Error::NotHermitian(herm));
            }
            let reduced = q.adjoint() * &hm * &q;
            let (vals, small) = dense_eigen(&reduced, k);
            let vecs = small
                .iter()
                .map(|s| {
                    let col = &q * nalgebra::DVector::from_column_slice(s);
                    col.iter().copied().collect()
                })
                .collect();
            finish(h, vals, vecs, Method::Dense, 0, opts)
        }
        Method::Iterative => {
            let herm = hermiticity_probe(h, opts.seed);
            if herm > 1e-10 {
                return Err(Error::NotHermitian(herm));
            }
            let (vals, vecs, iterations) = lanczos(h, Some(p), k, opts)?;
            finish(h, vals, vecs, Method::Iterative, iterations, opts)
        }
    }
}

fn clamp_k(k: usize, n: usize) -> usize {
    if k > n {
        warn!("requested {k} eigenvalues of a {n}-dimensional operator; clamped to {n}");
    }
    k.min(n)
}

fn finish(
    h: &dyn LinearMap,
    vals: Vec<f64>,
    vecs: Vec<Vec<C64>>,
    method: Method,
    iterations: usize,
    opts: &EigenOptions,
) -> Result<SpectrumResult> {
    let residuals: Vec<f64> = vals.iter().zip(&vecs).map(|(&l, v)| residual_norm(h, v, l)).collect();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if worst > opts.tol {
        return Err(Error::NotConverged {
            iterations,
            residual: worst,
        });
    }
    Ok(SpectrumResult {
        eigenvalues: vals,
        eigenvectors: opts.keep_vectors.then_some(vecs),
        residuals,
        method,
        seed: opts.seed,
        iterations,
    })
}

fn dense_eigen(m: &CMatrix, k: usize) -> (Vec<f64>, Vec<Vec<C64>>) {
    let eig = SymmetricEigen::new((m + m.adjoint()).scale(0.5));
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order
        .into_iter()
        .take(k)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect()))
        .unzip()
}

struct Projected<'a> {
    h: &'a dyn LinearMap,
    p: Option<&'a dyn LinearMap>,
}

impl Projected<'_> {
    fn project(&self, v: Vec<C64>) -> Vec<C64> {
        match self.p {
            Some(p) => p.apply(&v),
            None => v,
        }
    }

    fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.project(self.h.apply(v))
    }
}

/// Restarted Lanczos with full reorthogonalization.
///
/// One Krylov sequence holds a single vector per degenerate eigenspace, so
/// converged vectors are locked and the search repeats from a fresh seeded
/// vector in their orthogonal complement until it finds nothing below the
/// current `k`-th value.
fn lanczos(
    h: &dyn LinearMap,
    p: Option<&dyn LinearMap>,
    k: usize,
    opts: &EigenOptions,
) -> Result<(Vec<f64>, Vec<Vec<C64>>, usize)> {
    let op = Projected { h, p };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<(f64, Vec<C64>)> = Vec::new();
    let mut total = 0;
    loop {
        let mut start = op.project(random_vector(&mut rng, h.dim()));
        let locked_vecs: Vec<Vec<C64>> = locked.iter().map(|(_, v)| v.clone()).collect();
        orthogonalize(&mut start, &locked_vecs);
        if norm(&start) < 1e-10 {
            break;
        }
        let (found, iterations) = restarted_run(&op, start, &locked_vecs, k, opts)?;
        total += iterations;
        let kth = if locked.len() >= k {
            locked[k - 1].0
        } else {
            f64::INFINITY
        };
        let lowest_new = found.first().map_or(f64::INFINITY, |f| f.0);
        debug!("lanczos pass: {} new pairs, lowest {lowest_new}", found.len());
        let done = lowest_new > kth + DEGENERACY_TOL || found.is_empty();
        locked.extend(found);
        locked.sort_by(|a, b| a.0.total_cmp(&b.0));
        if done {
            break;
        }
        if total >= opts.max_iterations {
            return Err(Error::NotConverged {
                iterations: total,
                residual: f64::NAN,
            });
        }
    }
    locked.truncate(k);
    let (vals, vecs) = locked.into_iter().unzip();
    Ok((vals, vecs, total))
}

/// One thick-restart Lanczos run in the complement of `locked`; returns the
/// converged lowest pairs (at most `k`).
fn restarted_run(
    op: &Projected,
    start: Vec<C64>,
    locked: &[Vec<C64>],
    k: usize,
    opts: &EigenOptions,
) -> Result<(Vec<(f64, Vec<C64>)>, usize)> {
    let n = start.len();
    let m_max = opts.krylov_dim.max(2 * k + 10).min(n.saturating_sub(locked.len())).max(1);
    let keep = (k + m_max.saturating_sub(k) / 2).min(m_max.saturating_sub(1)).max(1);
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let mut images: Vec<Vec<C64>> = Vec::new();
    let mut t = CMatrix::zeros(0, 0);
    let mut next = start;
    let mut iterations = 0;
    let mut best = f64::INFINITY;
    loop {
        // expand
        while basis.len() < m_max {
            orthogonalize(&mut next, locked);
            orthogonalize(&mut next, &basis);
            let nv = norm(&next);
            if nv < 1e-12 {
                break;
            }
            scale(&mut next, 1.0 / nv);
            let mut w = op.apply(&next);
            orthogonalize(&mut w, locked);
            iterations += 1;
            let size = basis.len() + 1;
            let mut grown = CMatrix::zeros(size, size);
            grown.view_mut((0, 0), (size - 1, size - 1)).copy_from(&t);
            basis.push(next);
            for (i, b) in basis.iter().enumerate() {
                let z = dot(b, &w);
                grown[(i, size - 1)] = z;
                grown[(size - 1, i)] = z.conj();
            }
            grown[(size - 1, size - 1)] = real(grown[(size - 1, size - 1)].re);
            t = grown;
            next = w.clone();
            images.push(w);
        }
        let size = basis.len();
        let eig = SymmetricEigen::new(t.clone());
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let want = k.min(size);
        let ritz = |i: usize, from: &[Vec<C64>]| -> Vec<C64> {
            let mut y = vec![ZERO; n];
            for (j, v) in from.iter().enumerate() {
                axpy(&mut y, eig.eigenvectors[(j, i)], v);
            }
            y
        };
        let mut converged = true;
        let mut worst: f64 = 0.0;
        for &i in order.iter().take(want) {
            let y = ritz(i, &basis);
            let mut r = ritz(i, &images);
            axpy(&mut r, real(-eig.eigenvalues[i]), &y);
            let res = norm(&r);
            worst = worst.max(res);
            if res > opts.tol * 0.1 {
                converged = false;
            }
        }
        best = best.min(worst);
        // an exhausted subspace is exact
        let exhausted = size < m_max || size + locked.len() >= n;
        if converged || exhausted {
            let pairs = order
                .iter()
                .take(want)
                .map(|&i| (eig.eigenvalues[i], ritz(i, &basis)))
                .collect();
            return Ok((pairs, iterations));
        }
        if iterations >= opts.max_iterations {
            return Err(Error::NotConverged {
                iterations,
                residual: best,
            });
        }
        // thick restart: keep the lowest Ritz vectors and continue from the
        // residual of the last basis vector
        let mut cont = images[size - 1].clone();
        orthogonalize(&mut cont, &basis);
        let kept: Vec<usize> = order.iter().take(keep).copied().collect();
        let new_basis: Vec<Vec<C64>> = kept.iter().map(|&i| ritz(i, &basis)).collect();
        let new_images: Vec<Vec<C64>> = kept.iter().map(|&i| ritz(i, &images)).collect();
        let mut new_t = CMatrix::zeros(kept.len(), kept.len());
        for (a, &i) in kept.iter().enumerate() {
            new_t[(a, a)] = real(eig.eigenvalues[i]);
        }
        // off-diagonal couplings within the kept block vanish up to rounding
        for a in 0..kept.len() {
            for b in 0..kept.len() {
                if a != b {
                    new_t[(a, b)] = dot(&new_basis[a], &new_images[b]);
                }
            }
        }
        basis = new_basis;
        images = new_images;
        t = (&new_t + new_t.adjoint()).scale(0.5);
        next = cont;
    }
}

/// `<v|O|v>` for a normalized state.
pub fn expectation(op: &dyn LinearMap, state: &[C64]) -> Result<C64> {
    if op.dim() != state.len() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: state.len(),
        });
    }
    Ok(dot(state, &op.apply(state)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableReport {
    pub name: String,
    pub value: [f64; 2],
    pub hermitian: bool,
    pub state: String,
}

impl ObservableReport {
    pub fn new(name: impl Into<String>, value: C64, hermitian: bool, state: impl Into<String>) -> Self {
        let value = if hermitian && value.im.abs() <= 1e-10 {
            [value.re, 0.0]
        } else {
            [value.re, value.im]
        };
        Self {
            name: name.into(),
            value,
            hermitian,
            state: state.into(),
        }
    }
}

pub const OBSERVABLES: [&str; 8] = [
    "energy",
    "mass",
    "tunneling",
    "electric",
    "magnetic",
    "plaquette",
    "singlet_fraction",
    "fermion_number",
];

/// Evaluates named observables on a state of the model.
pub fn observables(model: &Model, names: &[String], state: &[C64], label: &str) -> Result<Vec<ObservableReport>> {
    let h = model.hamiltonian()?;
    let mut out = Vec::new();
    for name in names {
        let report = match name.as_str() {
            "energy" => ObservableReport::new(name, expectation(&h, state)?, true, label),
            "mass" | "tunneling" | "electric" | "magnetic" => {
                let kind = match name.as_str() {
                    "mass" => TermKind::Mass,
                    "tunneling" => TermKind::Tunneling,
                    "electric" => TermKind::Electric,
                    _ => TermKind::Magnetic,
                };
                let value = match h.term(kind) {
                    Some(t) => expectation(t, state)?,
                    None => ZERO,
                };
                ObservableReport::new(name, value, true, label)
            }
            "plaquette" => {
                let count = model.plaquettes.len();
                let mut acc = ZERO;
                for p in 0..count {
                    acc += expectation(&model.wilson_loop(p)?, state)?;
                }
                let avg = if count == 0 { ZERO } else { acc / count as f64 };
                ObservableReport::new(name, avg, false, label)
            }
            "singlet_fraction" => {
                let trivial = model
                    .catalog()
                    .trivial_irrep()
                    .ok_or_else(|| Error::InvalidModel("catalog has no trivial irrep".into()))?;
                let proj = model
                    .link_space
                    .to_basis(&model.link_space.projector_rep(trivial), model.link_basis)?;
                let mut acc = ZERO;
                for l in 0..model.links.len() {
                    acc += expectation(&model.embed_link(&proj, l)?, state)?;
                }
                let links = model.links.len().max(1) as f64;
                ObservableReport::new(name, acc / links, true, label)
            }
            "fermion_number" => {
                let mut acc = ZERO;
                if model.has_matter() {
                    for v in 0..model.lattice.num_vertices() {
                        let number = model.embed_vertex(model.vertex_space(v).number(), v)?;
                        acc += expectation(&number, state)?;
                    }
                }
                ObservableReport::new(name, acc, true, label)
            }
            other => {
                return Err(Error::InvalidParameter {
                    name: "observables".into(),
                    reason: format!("unknown observable `{other}`; known: {}", OBSERVABLES.join(", ")),
                })
            }
        };
        out.push(report);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VortexMass {
    pub class: usize,
    pub representative: String,
    pub character: [f64; 2],
    /// `(chi_j(e) - Re chi_j(C)) / g^2`.
    pub predicted: f64,
    /// Energy of a plaquette with holonomy in the class, above the ground state.
    pub gap: f64,
    /// Distance from `gap` to the nearest level of the diagonalized spectrum.
    pub spectrum_mismatch: f64,
}

/// Magnetic excitation energies per conjugacy class for a single plaquette
/// of a finite-group pure-gauge model.
pub fn vortex_masses(model: &Model, opts: &EigenOptions) -> Result<Vec<VortexMass>> {
    let spec = model.catalog().require_finite("vortex_masses")?;
    if model.has_matter() || model.plaquettes.len() != 1 || model.link_basis != Basis::Group {
        return Err(Error::InvalidModel(
            "vortex masses need a single pure-gauge plaquette in the group basis".into(),
        ));
    }
    let mut params = model.params.clone();
    params.terms = TermSet::magnetic_only();
    let magnetic = Model::new(model.catalog().clone(), model.lattice.clone(), params, Basis::Group)?;
    let h = magnetic.hamiltonian()?;
    let table = model.catalog().character_table()?;
    let chi = &table.chi[magnetic.magnetic_irrep];
    let g2 = magnetic.params.coupling.powi(2);
    let plaquette = magnetic.plaquettes[0];

    // state with holonomy g: g on the first plaquette link, identity elsewhere
    let holonomy_state = |g: usize| -> Vec<C64> {
        let mut digits = vec![spec.identity; magnetic.basis.num_factors()];
        digits[magnetic.link_factor(plaquette.links[0])] = g;
        let mut v = vec![ZERO; magnetic.dim()];
        v[magnetic.basis.encode(&digits)] = real(1.0);
        v
    };
    let ground = expectation(&h, &holonomy_state(spec.identity))?.re;
    let spectrum = eigensolve(&h, magnetic.dim(), &EigenOptions {
        keep_vectors: false,
        ..opts.clone()
    })?;
    let mut out = Vec::new();
    for (class, &rep) in table.class_representatives.iter().enumerate() {
        let state = holonomy_state(rep);
        let energy = expectation(&h, &state)?.re;
        let gap = energy - ground;
        let mismatch = spectrum
            .eigenvalues
            .iter()
            .map(|l| (l - energy).abs())
            .fold(f64::INFINITY, f64::min);
        out.push(VortexMass {
            class,
            representative: spec.element_labels[rep].clone(),
            character: [chi[class].re, chi[class].im],
            predicted: (chi[spec.class_of[spec.identity]].re - chi[class].re) / g2,
            gap,
            spectrum_mismatch: mismatch,
        });
    }
    Ok(out)
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GroupCatalogEntry, GroupKind, GroupSpec, IrrepKind, LieGroup};
use crate::linalg::{commutator, identity, max_abs_diff, unitarity_residual, CMatrix, C64, I};
use crate::report::{Report, DEFAULT_TOL};

pub type ValidationReport = Report;

/// Above this order associativity is sampled instead of checked exhaustively.
const EXHAUSTIVE_ASSOC_MAX: usize = 64;
const ASSOC_SAMPLES: usize = 10_000;
const ASSOC_SEED: u64 = 0x5eed;

/// Checks every group and irrep invariant, reporting residuals instead of failing.
pub fn validate(entry: &GroupCatalogEntry) -> ValidationReport {
    match &entry.group {
        GroupKind::Finite(g) => validate_finite(entry, g),
        GroupKind::Lie(l) => validate_lie(entry, *l),
    }
}

fn table_checks(g: &GroupSpec, report: &mut Report) {
    let n = g.order;
    let is_perm = |f: &dyn Fn(usize) -> usize| {
        let mut seen = vec![false; n];
        (0..n).all(|i| !std::mem::replace(&mut seen[f(i)], true))
    };
    let latin = (0..n).all(|a| is_perm(&|b| g.mul[a][b])) && (0..n).all(|b| is_perm(&|a| g.mul[a][b]));
    report.push(crate::report::CheckResult::flag("latin_square", latin));

    let assoc_fail = |a: usize, b: usize, c: usize| g.mul[g.mul[a][b]][c] != g.mul[a][g.mul[b][c]];
    let assoc = if n <= EXHAUSTIVE_ASSOC_MAX {
        !(0..n).any(|a| (0..n).any(|b| (0..n).any(|c| assoc_fail(a, b, c))))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(ASSOC_SEED);
        !(0..ASSOC_SAMPLES).any(|_| assoc_fail(rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n)))
    };
    report.push(crate::report::CheckResult::flag("associativity", assoc));

    let e = g.identity;
    let ident = (0..n).all(|x| g.mul[e][x] == x && g.mul[x][e] == x);
    report.push(crate::report::CheckResult::flag("identity", ident));
    let inverses = (0..n).all(|x| g.mul[x][g.inv[x]] == e && g.mul[g.inv[x]][x] == e);
    report.push(crate::report::CheckResult::flag("inverses", inverses));
    let closed = (0..n).all(|x| (0..n).all(|h| g.class_of[g.mul[g.mul[g.inv[h]][x]][h]] == g.class_of[x]));
    report.push(crate::report::CheckResult::flag("class_closure", closed));
}

fn validate_finite(entry: &GroupCatalogEntry, g: &GroupSpec) -> Report {
    let mut report = Report::default();
    table_checks(g, &mut report);
    let n = g.order;
    let tol = DEFAULT_TOL;

    for r in &entry.irreps {
        let shapes_ok = r.matrices.len() == n && r.matrices.iter().all(|m| m.shape() == (r.dim, r.dim));
        if !shapes_ok {
            report.push(crate::report::CheckResult::flag(format!("irrep[{}].shape", r.label), false));
            continue;
        }
        let unit = r.matrices.iter().map(unitarity_residual).fold(0.0, f64::max);
        report.check(format!("irrep[{}].unitarity", r.label), unit, tol);
        let inv_adj = (0..n)
            .map(|x| max_abs_diff(&r.matrices[g.inv[x]], &r.matrices[x].adjoint()))
            .fold(0.0, f64::max);
        report.check(format!("irrep[{}].inverse_is_adjoint", r.label), inv_adj, tol);
        let mut hom: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let prod = &r.matrices[a] * &r.matrices[b];
                hom = hom.max(max_abs_diff(&prod, &r.matrices[g.mul[a][b]]));
            }
        }
        report.check(format!("irrep[{}].homomorphism", r.label), hom, tol);
        let id = max_abs_diff(&r.matrices[g.identity], &identity(r.dim));
        report.check(format!("irrep[{}].identity", r.label), id, tol);
    }
    if !report.passed() && report.checks.iter().any(|c| c.name.ends_with(".shape")) {
        return report;
    }

    let sum = entry.dim_sum_squares();
    report.check("completeness_sum_dim_squared", (sum as f64 - n as f64).abs(), 0.5);
    report.check("great_orthogonality", great_orthogonality_residual(entry, g), tol);
    if sum == n {
        let f = entry.fourier_matrix().expect("complete irrep set");
        report.check("fourier_unitarity", unitarity_residual(&f), tol);
    }

    let table = entry.character_table().expect("finite entry");
    report.check("character_class_function", table.class_function_residual, tol);
    let mut row_orth: f64 = 0.0;
    for a in 0..table.chi.len() {
        for b in 0..table.chi.len() {
            let s: C64 = (0..table.num_classes())
                .map(|cl| table.chi[a][cl] * table.chi[b][cl].conj() * table.class_sizes[cl] as f64)
                .sum();
            let expect = if a == b { n as f64 } else { 0.0 };
            row_orth = row_orth.max((s - expect).norm());
        }
    }
    report.check("character_row_orthogonality", row_orth, tol);
    if sum == n {
        let mut reg: f64 = 0.0;
        for cl in 0..table.num_classes() {
            let s: C64 = entry.irreps.iter().enumerate().map(|(j, r)| table.chi[j][cl] * r.dim as f64).sum();
            let expect = if table.class_representatives[cl] == g.identity { n as f64 } else { 0.0 };
            reg = reg.max((s - expect).norm());
        }
        report.check("regular_character_identity", reg, tol);
    }

    let fund = &entry.irreps[entry.fundamental];
    let faithful = (0..n).all(|a| (a + 1..n).all(|b| max_abs_diff(&fund.matrices[a], &fund.matrices[b]) > 1e-8));
    report.push(crate::report::CheckResult::flag("fundamental_faithful", faithful));
    report
}

/// `max |(1/|G|) sum_g D^j_{mn}(g) D^{j'}_{m'n'}(g)^* - delta/dim(j)|`.
pub(crate) fn great_orthogonality_residual(entry: &GroupCatalogEntry, g: &GroupSpec) -> f64 {
    let n = g.order as f64;
    let mut worst: f64 = 0.0;
    for (ja, ra) in entry.irreps.iter().enumerate() {
        for (jb, rb) in entry.irreps.iter().enumerate() {
            for m in 0..ra.dim {
                for nn in 0..ra.dim {
                    for mp in 0..rb.dim {
                        for np in 0..rb.dim {
                            let s: C64 = (0..g.order)
                                .map(|x| ra.matrices[x][(m, nn)] * rb.matrices[x][(mp, np)].conj())
                                .sum::<C64>()
                                / n;
                            let expect = if ja == jb && m == mp && nn == np { 1.0 / ra.dim as f64 } else { 0.0 };
                            worst = worst.max((s - expect).norm());
                        }
                    }
                }
            }
        }
    }
    worst
}

fn validate_lie(entry: &GroupCatalogEntry, lie: LieGroup) -> Report {
    let mut report = Report::default();
    let tol = DEFAULT_TOL;
    for r in &entry.irreps {
        let herm = r
            .generators
            .iter()
            .map(|t| max_abs_diff(t, &t.adjoint()))
            .fold(0.0, f64::max);
        report.check(format!("irrep[{}].generators_hermitian", r.label), herm, tol);
        if let Some(cas) = r.casimir {
            let mut sq = CMatrix::zeros(r.dim, r.dim);
            for t in &r.generators {
                sq += t * t;
            }
            report.check(
                format!("irrep[{}].casimir", r.label),
                max_abs_diff(&sq, &identity(r.dim).scale(cas)),
                tol,
            );
        }
        match (lie, r.kind) {
            (LieGroup::Su2 { .. }, IrrepKind::Spin { twice_j }) => {
                let t = &r.generators;
                let mut res: f64 = 0.0;
                for (a, b, cc) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
                    res = res.max(max_abs_diff(&commutator(&t[a], &t[b]), &(&t[cc] * I)));
                }
                report.check(format!("irrep[{}].su2_algebra", r.label), res, tol);
                report.push(crate::report::CheckResult::flag(
                    format!("irrep[{}].dimension", r.label),
                    r.dim == twice_j as usize + 1,
                ));
            }
            (LieGroup::U1 { .. }, IrrepKind::Charge { p }) => {
                let res = (r.generators[0][(0, 0)] - C64::new(p as f64, 0.0)).norm();
                report.check(format!("irrep[{}].charge", r.label), res, tol);
            }
            _ => report.push(crate::report::CheckResult::flag(format!("irrep[{}].kind", r.label), false)),
        }
    }
    let expected_irreps = match lie {
        LieGroup::Su2 { twice_jmax } => twice_jmax as usize + 1,
        LieGroup::U1 { cutoff } => 2 * cutoff as usize + 1,
    };
    report.push(crate::report::CheckResult::flag(
        "all_truncated_irreps_present",
        entry.irreps.len() == expected_irreps && entry.rep_states().len() == entry.dim_sum_squares(),
    ));
    report.push(crate::report::CheckResult::flag("trivial_irrep_present", entry.trivial_irrep().is_some()));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_builtin, GroupParams};
    use crate::linalg::real;

    #[test]
    fn builtins_validate_to_machine_precision() {
        for (name, kv) in [
            ("D3", vec![]),
            ("Z_N", vec![("N", "2")]),
            ("Z_N", vec![("N", "5")]),
            ("Z_N", vec![("N", "8")]),
            ("SU2_trunc", vec![("J_max", "3/2")]),
            ("U1_trunc", vec![("P", "2")]),
        ] {
            let params: GroupParams = kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
            let e = build_builtin(name, &params).unwrap();
            let r = validate(&e);
            assert!(r.passed(), "{name}: {r}");
            assert!(r.max_residual() < 1e-14, "{name}: {}", r.max_residual());
        }
    }

    #[test]
    fn perturbed_matrix_breaks_homomorphism() {
        let mut e = build_builtin("D3", &GroupParams::new()).unwrap();
        e.irreps[2].matrices[1][(0, 0)] += real(1e-3);
        let r = validate(&e);
        let hom = r.get("irrep[2].homomorphism").unwrap();
        assert!(!hom.passed);
        assert!((hom.residual - 1e-3).abs() < 2e-4, "{}", hom.residual);
    }
}

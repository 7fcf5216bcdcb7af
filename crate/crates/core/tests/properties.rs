use proptest::prelude::*;

use gaugefock::config::RunConfig;
use gaugefock::group::{parse_group_ref, GroupElement};
use gaugefock::linalg::{c, max_abs_diff, C64};
use gaugefock::link::LinkSpace;
use gaugefock::sparse::SparseMatrix;

fn triplets(n: usize) -> impl Strategy<Value = Vec<(usize, usize, C64)>> {
    prop::collection::vec((0..n, 0..n, -2.0..2.0f64, -2.0..2.0f64), 0..3 * n)
        .prop_map(|v| v.into_iter().map(|(r, k, a, b)| (r, k, c(a, b))).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sparse_products_match_dense(a in triplets(7), b in triplets(7), x in prop::collection::vec(-1.0..1.0f64, 7)) {
        let (sa, sb) = (SparseMatrix::from_triplets(7, 7, a), SparseMatrix::from_triplets(7, 7, b));
        let (da, db) = (sa.to_dense(), sb.to_dense());
        prop_assert!(max_abs_diff(&sa.matmul(&sb).to_dense(), &(&da * &db)) < 1e-12);
        prop_assert!(max_abs_diff(&sa.adjoint().to_dense(), &da.adjoint()) == 0.0);
        let v: Vec<C64> = x.iter().map(|&r| c(r, -r)).collect();
        let dv = &da * nalgebra::DVector::from_column_slice(&v);
        let sv = sa.matvec(&v);
        prop_assert!(sv.iter().zip(dv.iter()).all(|(p, q)| (p - q).norm() < 1e-12));
    }

    #[test]
    fn cyclic_translations_compose(n in 2usize..9, g in 0usize..64, h in 0usize..64) {
        let s = LinkSpace::new(parse_group_ref(&format!("Z_N:N={n}")).unwrap());
        let (g, h) = (g % n, h % n);
        let gh = GroupElement::Finite((g + h) % n);
        let lhs = s.theta_left(&GroupElement::Finite(g)).compose(&s.theta_left(&GroupElement::Finite(h))).unwrap();
        prop_assert!(lhs.max_abs_diff(&s.theta_left(&gh)).unwrap() < 1e-12);
        let rhs = s.theta_right(&GroupElement::Finite(g)).compose(&s.theta_right(&GroupElement::Finite(h))).unwrap();
        prop_assert!(rhs.max_abs_diff(&s.theta_right(&gh)).unwrap() < 1e-12);
    }

    #[test]
    fn config_echo_round_trips(seed in any::<u64>(), mass in -3.0..3.0f64, coupling in 0.1..4.0f64, k in 1usize..50, lx in 1usize..4) {
        let text = format!(
            "seed = {seed}\n[group]\nbuiltin = \"D3\"\n[lattice]\nlx = {lx}\nly = 1\ninclude_matter = true\n\
             [params]\nmass = {mass:?}\ncoupling = {coupling:?}\n[[tasks]]\nkind = \"spectrum\"\nk = {k}\n"
        );
        let cfg = RunConfig::from_toml(&text).unwrap();
        let echo = serde_json::json!({ "version": "x", "config": cfg }).to_string();
        prop_assert_eq!(RunConfig::from_json(&echo).unwrap(), cfg);
    }
}

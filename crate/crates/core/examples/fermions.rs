//! Staggered vertex Fock spaces and the matter gauge transformation.

use gaugefock::group::{parse_group_ref, GroupElement};
use gaugefock::matter::VertexFock;

fn main() -> gaugefock::Result<()> {
    let d3 = parse_group_ref("D3")?;
    for parity in [0u8, 1] {
        let v = VertexFock::for_catalog(&d3, parity);
        println!("D3 vertex, parity {parity}:");
        for g in 0..6 {
            let t = v.theta_q(&d3, &GroupElement::Finite(g));
            println!(
                "  {:<16} <full|Theta|full> = {:+.3}",
                d3.finite().unwrap().element_labels[g],
                t.get(v.full(), v.full()).re
            );
        }
    }

    let su2 = parse_group_ref("SU2_trunc:J_max=1/2")?;
    let v = VertexFock::for_catalog(&su2, 0);
    for (a, q) in v.charge_su2(&su2)?.iter().enumerate() {
        println!("SU(2) charge Q_{a}:\n{}", q.to_dense());
    }
    Ok(())
}

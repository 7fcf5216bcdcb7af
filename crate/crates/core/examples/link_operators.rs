//! Link Hilbert space: transformation operators, the connection U and the
//! truncation defect of Tr(U^dagger U).

use gaugefock::group::{parse_group_ref, GroupElement};
use gaugefock::link::LinkSpace;

fn rounded(z: gaugefock::linalg::C64) -> f64 {
    (z.re * 1e12).round() / 1e12
}

fn main() -> gaugefock::Result<()> {
    let d3 = LinkSpace::new(parse_group_ref("D3")?);
    let g = GroupElement::Finite(1);
    let left = d3.to_group_basis(&d3.theta_left(&g))?;
    println!("D3 Theta^L_xi in the group basis (a permutation):\n{}", left.matrix.to_dense().map(rounded));

    let su2 = LinkSpace::new(parse_group_ref("SU2_trunc:J_max=1/2")?);
    let u = su2.u_matrix_rep(1)?;
    for m in 0..2 {
        for n in 0..2 {
            println!("U_{m}{n} =\n{}", u.get(m, n).matrix.to_dense().map(rounded));
        }
    }
    println!("dropped channels {:?}", u.dropped);

    for jmax in ["1/2", "1", "3/2"] {
        let s = LinkSpace::new(parse_group_ref(&format!("SU2_trunc:J_max={jmax}"))?);
        let d = s.trace_diagnostic(1)?;
        println!(
            "J_max={jmax}: Tr(U^dagger U) = 2 - {:.6} P_top, residual {:.1e}",
            d.defect.unwrap_or(f64::NAN),
            d.residual.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

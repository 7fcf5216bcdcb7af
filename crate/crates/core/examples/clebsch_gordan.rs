//! Tensor-product decompositions and Clebsch-Gordan tables.

use gaugefock::clebsch_gordan::{cg, decompose};
use gaugefock::group::{parse_group_ref, GroupCatalogEntry};

fn show(entry: &GroupCatalogEntry, a: &str, b: &str) -> gaugefock::Result<()> {
    let (j1, j2) = (entry.irrep_index(a)?, entry.irrep_index(b)?);
    let dec = decompose(entry, j1, j2);
    println!("{}: {a} x {b}", entry.name);
    for t in &dec.terms {
        let Some(k) = t.irrep else {
            println!("  {} (dim {}) lies above the truncation", t.label, t.dim);
            continue;
        };
        let c = cg(entry, j1, j2, k)?;
        println!("  {} (dim {}), orthonormality {:.1e}", t.label, t.dim, c.orthonormality_residual());
        for big_m in 0..c.dims.0 {
            for m in 0..c.dims.1 {
                let row: Vec<String> = (0..c.dims.2).map(|n| format!("{:+.4}", c.get(big_m, m, n).re)).collect();
                println!("    M={big_m} m={m}: {}", row.join(" "));
            }
        }
    }
    Ok(())
}

fn main() -> gaugefock::Result<()> {
    show(&parse_group_ref("D3")?, "2", "2")?;
    let su2 = parse_group_ref("SU2_trunc:J_max=1")?;
    show(&su2, "1/2", "1/2")?;
    show(&su2, "1", "1/2")?;
    Ok(())
}

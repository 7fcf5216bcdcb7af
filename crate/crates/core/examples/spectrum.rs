//! Gauss-law sector spectra: the Z2 torus has a four-fold ground level in the
//! trivial sector, the quantum-double ground space.

use gaugefock::group::parse_group_ref;
use gaugefock::lattice::{LatticeSpec, Model, ModelParams, TermSet};
use gaugefock::link::Basis;
use gaugefock::spectra::{eigensolve, sector_eigensolve, EigenOptions, DEGENERACY_TOL};

fn main() -> gaugefock::Result<()> {
    let params = ModelParams {
        terms: TermSet::magnetic_only(),
        ..ModelParams::default()
    };
    let model = Model::new(parse_group_ref("Z2")?, LatticeSpec::periodic(2, 2, false), params, Basis::Rep)?;
    let h = model.hamiltonian()?;
    let opts = EigenOptions::default();

    let full = eigensolve(&h, 64, &opts)?;
    println!("full space ({}):", model.dim());
    for l in full.levels(DEGENERACY_TOL) {
        println!("  E = {:+.6} x{}", l.energy, l.multiplicity);
    }
    let sector = sector_eigensolve(&h, &model.physical_projector(None)?, 32, &opts)?;
    println!("trivial Gauss sector:");
    for l in sector.levels(DEGENERACY_TOL) {
        println!("  E = {:+.6} x{}", l.energy, l.multiplicity);
    }
    Ok(())
}

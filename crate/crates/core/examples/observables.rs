//! Ground-state expectation values along a mass scan of a Z2 ladder.

use gaugefock::group::parse_group_ref;
use gaugefock::lattice::{LatticeSpec, Model, ModelParams};
use gaugefock::link::Basis;
use gaugefock::spectra::{observables, sector_eigensolve, EigenOptions, OBSERVABLES};

fn main() -> gaugefock::Result<()> {
    let names: Vec<String> = OBSERVABLES.iter().map(|s| s.to_string()).collect();
    println!("{:>6} {}", "m", OBSERVABLES.join(" "));
    for mass in [-1.0, 0.0, 0.5, 1.0, 2.0] {
        let params = ModelParams {
            mass,
            coupling: 1.3,
            ..ModelParams::default()
        };
        let model = Model::new(parse_group_ref("Z2")?, LatticeSpec::open(3, 2, true), params, Basis::Rep)?;
        let opts = EigenOptions {
            keep_vectors: true,
            ..EigenOptions::default()
        };
        let ground = sector_eigensolve(&model.hamiltonian()?, &model.physical_projector(None)?, 1, &opts)?;
        let state = &ground.eigenvectors.as_ref().unwrap()[0];
        let values: Vec<String> = observables(&model, &names, state, "ground")?
            .iter()
            .map(|o| format!("{:+.4}", o.value[0]))
            .collect();
        println!("{mass:>6} {}", values.join(" "));
    }
    Ok(())
}

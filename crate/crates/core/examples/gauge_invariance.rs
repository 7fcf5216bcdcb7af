//! Probes every Hamiltonian term of a D3 plaquette with matter against every
//! Gauss-law transformation.

use std::time::Instant;

use gaugefock::group::parse_group_ref;
use gaugefock::lattice::{LatticeSpec, Model, ModelParams};
use gaugefock::link::Basis;
use gaugefock::verify::{verify_model, VerifyOptions};

fn main() -> gaugefock::Result<()> {
    let weights = [("I", 0.0), ("p", 2.0), ("2", 1.5)];
    let params = ModelParams {
        mass: 0.5,
        epsilon: 1.0,
        coupling: 1.2,
        electric_weights: Some(weights.iter().map(|(k, v)| (k.to_string(), *v)).collect()),
        ..ModelParams::default()
    };
    let model = Model::new(parse_group_ref("D3")?, LatticeSpec::open(2, 2, true), params, Basis::Rep)?;
    println!("dimension {}", model.dim());
    let start = Instant::now();
    let report = verify_model(&model, &VerifyOptions::default())?;
    print!("{report}");
    println!("{} checks in {:.1?}", report.checks.len(), start.elapsed());
    Ok(())
}

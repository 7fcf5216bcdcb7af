//! Builds Kogut-Susskind Hamiltonians term by term.

use gaugefock::group::parse_group_ref;
use gaugefock::lattice::{LatticeSpec, Model, ModelParams};
use gaugefock::link::Basis;
use gaugefock::spectra::hermiticity_probe;

fn main() -> gaugefock::Result<()> {
    let cases = [
        ("SU2_trunc:J_max=1/2", LatticeSpec::open(2, 1, true)),
        ("Z_N:N=3", LatticeSpec::open(2, 2, true)),
        ("U1_trunc:P=1", LatticeSpec::open(2, 2, false)),
    ];
    for (name, lattice) in cases {
        let params = ModelParams {
            mass: 0.5,
            coupling: 0.9,
            ..ModelParams::default()
        };
        let model = Model::new(parse_group_ref(name)?, lattice, params, Basis::Rep)?;
        let h = model.hamiltonian()?;
        println!("{name}: dimension {}", model.dim());
        for (kind, term) in &h.terms {
            println!(
                "  {kind:?}: {} local pieces, hermiticity {:.1e}",
                term.terms.len(),
                hermiticity_probe(term, 1)
            );
        }
    }
    Ok(())
}

//! Vortex masses of a single D3 plaquette against (1/g^2)(2 - chi_2(C)).

use gaugefock::group::parse_group_ref;
use gaugefock::lattice::{LatticeSpec, Model, ModelParams, TermSet};
use gaugefock::link::Basis;
use gaugefock::spectra::{vortex_masses, EigenOptions};

fn main() -> gaugefock::Result<()> {
    for coupling in [0.5, 1.0, 2.0] {
        let params = ModelParams {
            coupling,
            terms: TermSet::magnetic_only(),
            ..ModelParams::default()
        };
        let model = Model::new(parse_group_ref("D3")?, LatticeSpec::open(2, 2, false), params, Basis::Group)?;
        println!("g = {coupling}");
        for m in vortex_masses(&model, &EigenOptions::default())? {
            println!(
                "  class of {:<12} chi {:+.1}  gap {:.6}  predicted {:.6}",
                m.representative, m.character[0], m.gap, m.predicted
            );
        }
    }
    Ok(())
}

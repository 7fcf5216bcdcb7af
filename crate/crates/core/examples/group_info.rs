//! Character tables and the Fourier transform of the built-in finite groups.

use gaugefock::group::parse_group_ref;
use gaugefock::linalg::{unitarity_residual, CMatrix};
use gaugefock::run::group_info;

fn main() -> gaugefock::Result<()> {
    for name in ["D3", "Z_N:N=4", "SU2_trunc:J_max=1", "U1_trunc:P=2"] {
        let entry = parse_group_ref(name)?;
        println!("{}", group_info(&entry)?);
        if let Ok(f) = entry.fourier_matrix() {
            let f: CMatrix = f;
            println!("fourier unitarity residual {:.1e}\n", unitarity_residual(&f));
        }
    }
    Ok(())
}

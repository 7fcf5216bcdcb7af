//! Runs a configuration in-process and prints the JSON result.

use std::path::Path;

use gaugefock::config::RunConfig;
use gaugefock::run::{execute, RunOptions};

const CONFIG: &str = r#"
seed = 5

[group]
builtin = "Z_N"
params = { N = 3 }

[lattice]
lx = 2
ly = 2

[params]
coupling = 1.0
terms = { mass = false, tunneling = false, electric = false }

[[tasks]]
kind = "spectrum"
k = 9
sector = "trivial"

[[tasks]]
kind = "vortex-masses"
"#;

fn main() -> gaugefock::Result<()> {
    let config = RunConfig::from_toml(CONFIG)?;
    let result = execute(&config, Path::new("."), &RunOptions::default())?;
    print!("{}", result.to_json());
    println!("passed: {}", result.passed);
    Ok(())
}

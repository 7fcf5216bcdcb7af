//! Round-trips a group through the definition-file format and shows the
//! validator catching a corrupted irrep.

use gaugefock::group::file::{parse_group_toml, to_toml};
use gaugefock::group::{parse_group_ref, validate};

fn main() -> gaugefock::Result<()> {
    let text = to_toml(&parse_group_ref("D3")?)?;
    println!("{}", text.lines().take(6).collect::<Vec<_>>().join("\n"));

    let reloaded = parse_group_toml(&text)?;
    println!("reloaded: {} checks, all pass {}", validate(&reloaded).checks.len(), validate(&reloaded).passed());

    let corrupted = parse_group_toml(&text.replacen("[-1.0, 0.0]", "[1.0, 0.0]", 1))?;
    match validate(&corrupted).first_failure() {
        Some(bad) => println!("corrupted: first failure {} (residual {:.2e})", bad.name, bad.residual),
        None => println!("corrupted copy unexpectedly validates"),
    }
    Ok(())
}

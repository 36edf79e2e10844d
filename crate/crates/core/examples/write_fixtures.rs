//! Regenerates the bundles under `fixtures/`.
//!
//! Usage: `cargo run -p nilstrat-core --example write_fixtures [-- DIR]`

use std::path::PathBuf;

use nilstrat_core::catalog;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"));
    std::fs::create_dir_all(&dir)?;
    for (name, bundle) in catalog::shipped_fixtures()? {
        let path = dir.join(format!("{name}.{}", catalog::FILE_EXTENSION));
        catalog::save(&bundle, &path)?;
        println!("{}", path.display());
    }
    Ok(())
}

//! Writes the synthetic grid configs (`synthetic-<n>-<m>-<delta>.json`).
//!
//! cargo run --example export_configs -- [out-dir]

use std::path::PathBuf;

use container_sim::cli::write_shipped_configs;

fn main() -> std::io::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs"));
    write_shipped_configs(&dir)?;
    println!("wrote configs to {}", dir.display());
    Ok(())
}

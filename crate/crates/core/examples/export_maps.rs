//! Writes the shipped scenarios as JSON map files.
//!
//! ```text
//! cargo run --example export_maps -- crates/core/maps
//! ```

use std::path::PathBuf;

use lanegym::map::builtin;

fn main() -> anyhow::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "maps".into()));
    std::fs::create_dir_all(&dir)?;
    for name in builtin::SCENARIO_NAMES {
        let map = builtin::by_name(name).expect("shipped scenario");
        let path = dir.join(format!("{name}.json"));
        std::fs::write(&path, map.to_json() + "\n")?;
        println!(
            "{}: {} lanelets, {} paths",
            path.display(),
            map.lanelets.len(),
            map.reference_paths.len()
        );
    }
    Ok(())
}

//! Prints the block layout of every observation variant and one decoded observation.
//!
//! ```text
//! cargo run --example observation_layout -- [variant]
//! ```

use lanegym::env::{Env, EnvConfig};
use lanegym::observation::{ObservationLayout, Variant};

fn main() -> anyhow::Result<()> {
    let wanted: Variant = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "M0".into())
        .parse()
        .map_err(anyhow::Error::msg)?;
    for v in Variant::ALL {
        let mut cfg = EnvConfig::default();
        cfg.obs.variant = v;
        println!("{v}: {} values", ObservationLayout::new(&cfg.obs).len());
    }

    let mut cfg = EnvConfig::default();
    cfg.obs.variant = wanted;
    let env = Env::new(cfg)?;
    let layout = env.layout();
    println!("\n{}", layout.to_json());
    let obs = &env.observations()[0];
    for b in &layout.blocks {
        let vals: Vec<String> = layout
            .slice(&obs.values, &b.name)
            .unwrap()
            .iter()
            .map(|x| format!("{x:.3}"))
            .collect();
        println!("{:<24} {}", b.name, vals.join(" "));
    }
    Ok(())
}

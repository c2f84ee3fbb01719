//! Runs a small evaluation campaign and prints per-scenario means.
//!
//! ```text
//! cargo run --release --example evaluate -- [policy] [sims] [steps] [out]
//! ```

use lanegym::harness::{run_evaluation, Campaign};

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let policy = args.next().unwrap_or_else(|| "pure_pursuit".into());
    let sims = args.next().map(|s| s.parse()).transpose()?.unwrap_or(8);
    let steps = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1200);
    let out = args.next().unwrap_or_else(|| "out/evaluate".into());
    let campaign = Campaign {
        policy,
        sims,
        steps,
        out: out.into(),
        jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..Default::default()
    };
    let summary = run_evaluation(&campaign)?;
    println!(
        "{:<20} {:>8} {:>8} {:>8} {:>8} {:>8}",
        "scenario", "C_aa", "C_al", "C_total", "D_cm", "V_mps"
    );
    for s in &summary.scenarios {
        let m = s.mean;
        println!(
            "{:<20} {:>8.3} {:>8.3} {:>8.3} {:>8.3} {:>8.3}",
            s.scenario, m.c_aa, m.c_al, m.c_total, m.d_cm, m.v_mps
        );
    }
    println!("metrics written to {}", summary.csv_path.display());
    Ok(())
}

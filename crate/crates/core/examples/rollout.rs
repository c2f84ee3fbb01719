//! Drives one environment with a scripted policy and prints its metrics.
//!
//! ```text
//! cargo run --example rollout -- [scenario] [agents] [policy] [steps] [seed]
//! ```

use std::sync::Arc;

use lanegym::env::EnvConfig;
use lanegym::harness::run_simulation;
use lanegym::map::builtin;
use lanegym::observation::ObservationLayout;
use lanegym::policy::policy_by_name;

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let arg = |i: usize, default: &str| args.get(i).cloned().unwrap_or_else(|| default.to_string());
    let cfg = EnvConfig {
        scenario: arg(0, "loop_intersection"),
        num_agents: arg(1, "4").parse()?,
        seed: arg(4, "0").parse()?,
        ..Default::default()
    };
    let steps: u64 = arg(3, "1200").parse()?;
    let map = Arc::new(builtin::resolve(&cfg.scenario)?);
    let layout = ObservationLayout::new(&cfg.obs);
    let policy = policy_by_name(&arg(2, "pure_pursuit"), &layout, &cfg.vehicle)?;
    let m = run_simulation(map, cfg.clone(), policy.as_ref(), steps, None)?;
    println!(
        "{} agents on {} for {steps} steps ({:.0} s simulated)",
        cfg.num_agents,
        cfg.scenario,
        steps as f64 * cfg.dt
    );
    println!(
        "C_aa {:.3} %  C_al {:.3} %  C_total {:.3} %",
        m.c_aa, m.c_al, m.c_total
    );
    println!("D {:.3} cm  V {:.3} m/s", m.d_cm, m.v_mps);
    Ok(())
}

//! Runs a short campaign, scores it against a random baseline and renders one log as SVG frames.
//!
//! ```text
//! cargo run --example score_and_replay -- [out_dir]
//! ```

use std::path::PathBuf;

use lanegym::dynamics::VehicleParams;
use lanegym::harness::{log_file_name, replay_command, run_evaluation, score_command, Campaign};
use lanegym::metrics::{read_csv, write_csv};

fn main() -> anyhow::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "out/score_and_replay".into()),
    );
    let mut rows = Vec::new();
    for policy in ["pure_pursuit", "random"] {
        let campaign = Campaign {
            policy: policy.into(),
            sims: 2,
            steps: 300,
            out: out.join(policy),
            ..Default::default()
        };
        let summary = run_evaluation(&campaign)?;
        rows.extend(read_csv(&summary.csv_path)?);
    }
    let combined = out.join("metrics.csv");
    write_csv(std::fs::File::create(&combined)?, &rows)?;
    let report = score_command(&combined, Some(&out))?;
    print!("{}", report.text);

    let log = out
        .join("random")
        .join("logs")
        .join(log_file_name("loop_intersection", 0));
    let replay = replay_command(
        &log,
        "loop_intersection",
        &out.join("frames"),
        &VehicleParams::default(),
    )?;
    println!("{} frames in {}", replay.frames, replay.out_dir.display());
    Ok(())
}

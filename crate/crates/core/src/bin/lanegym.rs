use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lanegym::dynamics::VehicleParams;
use lanegym::env::EnvConfig;
use lanegym::harness::{self, Campaign, HarnessError};
use lanegym::map::builtin;
use lanegym::observation::Variant;

#[derive(Parser)]
#[command(
    name = "lanegym",
    version,
    about = "Batched multi-agent driving environment tools"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded simulations and write metrics.csv plus per-simulation logs.
    Evaluate {
        /// Shipped map name or JSON map path; repeat for several. Defaults to all shipped maps.
        #[arg(long)]
        scenario: Vec<String>,
        #[arg(long, default_value = "pure_pursuit")]
        policy: String,
        /// Label for the model column (defaults to the policy name).
        #[arg(long)]
        model: Option<String>,
        #[arg(long, default_value_t = 32)]
        sims: u32,
        #[arg(long, default_value_t = 1200)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value = "M0")]
        variant: Variant,
        #[arg(long, default_value_t = 4)]
        agents: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Environment config (.toml or .json) used as the per-simulation template.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Average a metrics CSV per model and print composite scores.
    Score {
        csv: PathBuf,
        /// Directory to write scores.txt and scores.json into.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a trajectory log as one SVG file per step.
    Replay {
        log: PathBuf,
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value = "frames")]
        out: PathBuf,
    },
    /// Load and validate a map file or shipped map name.
    MapValidate { map: String },
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Evaluate {
            scenario,
            policy,
            model,
            sims,
            steps,
            seed,
            out,
            variant,
            agents,
            jobs,
            config,
        } => {
            let mut env = match config {
                Some(path) => EnvConfig::from_path(path)?,
                None => EnvConfig::default(),
            };
            env.num_agents = agents;
            env.obs.variant = variant;
            let scenarios = if scenario.is_empty() {
                builtin::SCENARIO_NAMES
                    .iter()
                    .map(|s| s.to_string())
                    .collect()
            } else {
                scenario
            };
            let campaign = Campaign {
                scenarios,
                policy,
                model,
                sims,
                steps,
                base_seed: seed,
                out,
                env,
                jobs,
            };
            let summary = harness::run_evaluation(&campaign)?;
            println!(
                "{:<24} {:>8} {:>8} {:>8} {:>8} {:>8}",
                "scenario", "C_aa", "C_al", "C_total", "D_cm", "V_mps"
            );
            for s in &summary.scenarios {
                let m = s.mean;
                println!(
                    "{:<24} {:>8.3} {:>8.3} {:>8.3} {:>8.3} {:>8.3}",
                    s.scenario, m.c_aa, m.c_al, m.c_total, m.d_cm, m.v_mps
                );
            }
            println!("wrote {}", summary.csv_path.display());
        }
        Command::Score { csv, out } => {
            let report = harness::score_command(&csv, out.as_deref())?;
            print!("{}", report.text);
        }
        Command::Replay { log, scenario, out } => {
            let s = harness::replay_command(&log, &scenario, &out, &VehicleParams::default())?;
            println!("wrote {} frames to {}", s.frames, s.out_dir.display());
        }
        Command::MapValidate { map } => {
            print!("{}", harness::validate_map(&map)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}

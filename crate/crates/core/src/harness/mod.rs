//! Seeded evaluation campaigns, score reports, replay rendering and map checks.
//!
//! Simulation `k` of a campaign is seeded with `base_seed + k`, runs in
//! collider-only reset mode, and writes `logs/<scenario>_sim<k>.jsonl` plus
//! one row of `metrics.csv` under the output directory.

mod replay;
mod report;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::env::log::LogError;
use crate::env::{Env, EnvConfig, EnvError, ResetMode, TrajectoryWriter};
use crate::map::{builtin, MapError, ScenarioMap};
use crate::metrics::{self, MetricsAccumulator, MetricsError, MetricsRecord, MetricsRow};
use crate::observation::{ObservationLayout, Variant};
use crate::policy::{policy_by_name, Policy, PolicyError};

pub use replay::{render_frame, replay_command, ReplaySummary};
pub use report::{format_report, score_command, ScoreReport};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Log(#[from] LogError),
    #[error("log does not match scenario `{scenario}`: {message}")]
    Mismatch { scenario: String, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl HarnessError {
    /// True for errors caused by bad inputs rather than by the run itself.
    pub fn is_validation(&self) -> bool {
        match self {
            HarnessError::Invalid(_)
            | HarnessError::Map(_)
            | HarnessError::Policy(_)
            | HarnessError::Mismatch { .. }
            | HarnessError::Log(LogError::Parse { .. }) => true,
            HarnessError::Env(e) => matches!(
                e,
                EnvError::Map(_) | EnvError::Config(_) | EnvError::ConfigFile { .. }
            ),
            HarnessError::Metrics(e) => !matches!(e, MetricsError::Io(_)),
            _ => false,
        }
    }
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `bytes` to `path` through a sibling temp file and a rename.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    /// Shipped map names or JSON map paths.
    pub scenarios: Vec<String>,
    pub policy: String,
    /// Label written to the `model` column; defaults to the policy name.
    pub model: Option<String>,
    pub sims: u32,
    pub steps: u64,
    pub base_seed: u64,
    pub out: PathBuf,
    /// Template for every simulation; scenario, seed and reset mode are overridden.
    pub env: EnvConfig,
    /// Worker threads; 1 runs everything on the calling thread.
    pub jobs: usize,
}

impl Default for Campaign {
    fn default() -> Self {
        Self {
            scenarios: builtin::SCENARIO_NAMES
                .iter()
                .map(|s| s.to_string())
                .collect(),
            policy: "pure_pursuit".into(),
            model: None,
            sims: 32,
            steps: 1200,
            base_seed: 0,
            out: PathBuf::from("out"),
            env: EnvConfig::default(),
            jobs: 1,
        }
    }
}

impl Campaign {
    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.env.obs.variant = variant;
        self
    }

    pub fn model_label(&self) -> &str {
        self.model.as_deref().unwrap_or(&self.policy)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Invalid(m.to_string()));
        if self.scenarios.is_empty() {
            return bad("campaign needs at least one scenario");
        }
        if self.sims == 0 {
            return bad("--sims must be at least 1");
        }
        if self.steps == 0 {
            return bad("--steps must be at least 1");
        }
        if self.jobs == 0 {
            return bad("--jobs must be at least 1");
        }
        self.env.validate()?;
        Ok(())
    }
}

/// Mean metrics of one scenario in a campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSummary {
    pub scenario: String,
    pub mean: MetricsRecord,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationSummary {
    pub rows: Vec<MetricsRow>,
    pub scenarios: Vec<ScenarioSummary>,
    pub csv_path: PathBuf,
}

/// Policy RNG for a simulation seed, on a stream separate from the environment's.
pub fn policy_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    rng
}

/// Runs one simulation of `steps` steps, optionally logging every step.
pub fn run_simulation(
    map: Arc<ScenarioMap>,
    cfg: EnvConfig,
    policy: &dyn Policy,
    steps: u64,
    mut log: Option<&mut dyn Write>,
) -> Result<MetricsRecord, HarnessError> {
    let seed = cfg.seed;
    let mut env = Env::with_map(cfg, map)?;
    let mut rng = policy_rng(seed);
    let mut acc = MetricsAccumulator::new(env.agents().len());
    let mut writer = log.as_mut().map(|w| TrajectoryWriter::new(&mut **w));
    for _ in 0..steps {
        let actions = env
            .observations()
            .iter()
            .map(|o| policy.act(o, &mut rng))
            .collect::<Result<Vec<_>, _>>()?;
        let out = env.step(&actions)?;
        acc.accumulate(&out)?;
        if let Some(w) = writer.as_mut() {
            w.write_step(&out).map_err(|source| HarnessError::Io {
                path: "<log>".into(),
                source,
            })?;
        }
    }
    Ok(acc.finalize()?)
}

pub fn log_file_name(scenario: &str, sim: u32) -> String {
    format!("{scenario}_sim{sim:03}.jsonl")
}

/// Runs every (scenario, sim) pair of the campaign and writes logs and the metrics CSV.
pub fn run_evaluation(campaign: &Campaign) -> Result<EvaluationSummary, HarnessError> {
    campaign.validate()?;
    let maps = campaign
        .scenarios
        .iter()
        .map(|s| builtin::resolve(s).map(Arc::new))
        .collect::<Result<Vec<_>, _>>()?;
    let layout = ObservationLayout::new(&campaign.env.obs);
    let policy = policy_by_name(&campaign.policy, &layout, &campaign.env.vehicle)?;
    let log_dir = campaign.out.join("logs");
    fs::create_dir_all(&log_dir).map_err(io_err(&log_dir))?;

    let tasks: Vec<(usize, u32)> = (0..maps.len())
        .flat_map(|m| (0..campaign.sims).map(move |k| (m, k)))
        .collect();
    let model = campaign.model_label();
    let run = |&(m, k): &(usize, u32)| -> Result<MetricsRow, HarnessError> {
        let map = &maps[m];
        let cfg = EnvConfig {
            scenario: map.name.clone(),
            seed: campaign.base_seed.wrapping_add(u64::from(k)),
            reset_mode: ResetMode::TestResetColliders,
            ..campaign.env.clone()
        };
        let mut buf = BufWriter::new(Vec::new());
        let rec = run_simulation(
            Arc::clone(map),
            cfg,
            policy.as_ref(),
            campaign.steps,
            Some(&mut buf),
        )?;
        let bytes = buf.into_inner().map_err(|e| HarnessError::Io {
            path: "<log>".into(),
            source: e.into_error(),
        })?;
        write_atomic(&log_dir.join(log_file_name(&map.name, k)), &bytes)?;
        Ok(MetricsRow::new(model, &map.name, k, &rec))
    };
    let rows = if campaign.jobs == 1 {
        tasks.iter().map(run).collect::<Result<Vec<_>, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(campaign.jobs)
            .build()
            .map_err(|e| {
                HarnessError::Invalid(format!("cannot start {} workers: {e}", campaign.jobs))
            })?;
        pool.install(|| tasks.par_iter().map(run).collect::<Result<Vec<_>, _>>())?
    };

    let csv_path = campaign.out.join("metrics.csv");
    let mut bytes = Vec::new();
    metrics::write_csv(&mut bytes, &rows)?;
    write_atomic(&csv_path, &bytes)?;

    let scenarios = maps
        .iter()
        .map(|map| {
            let recs: Vec<MetricsRecord> = rows
                .iter()
                .filter(|r| r.scenario == map.name)
                .map(MetricsRow::record)
                .collect();
            ScenarioSummary {
                scenario: map.name.clone(),
                mean: MetricsRecord::mean(&recs).expect("sims >= 1"),
            }
        })
        .collect();
    Ok(EvaluationSummary {
        rows,
        scenarios,
        csv_path,
    })
}

/// Loads and validates a map by shipped name or JSON path; returns a short description.
pub fn validate_map(scenario: &str) -> Result<String, HarnessError> {
    let map = builtin::resolve(scenario)?;
    let mut s = format!(
        "map `{}`: {} lanelets, {} reference paths, bounds [{}, {}] x [{}, {}]\n",
        map.name,
        map.lanelets.len(),
        map.reference_paths.len(),
        map.bounds.min.x,
        map.bounds.max.x,
        map.bounds.min.y,
        map.bounds.max.y
    );
    for p in &map.reference_paths {
        s.push_str(&format!(
            "  path {}: {} lanelets, {:.3} m{}\n",
            p.id,
            p.lanelet_sequence.len(),
            p.length(),
            if p.is_loop { ", loop" } else { "" }
        ));
    }
    Ok(s)
}

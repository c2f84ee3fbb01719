//! Multi-agent stepping, resets and rewards.
//!
//! One [`Env`] owns a single world. [`BatchedEnv`] holds several independent
//! worlds over one shared map; instance `e` is seeded with `seed + e`.
//!
//! A step clamps the joint action, advances every agent, re-tracks it along its
//! reference path, flags collisions, computes rewards, applies the reset
//! policy and finally builds fresh observations for everyone.

pub mod log;

use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::collision::{
    agent_agent_flags, footprint, rect_polyline_collision, CollisionFlags, Footprint,
};
use crate::dynamics::{
    clamp_action, step_kinematics, Action, AgentState, DynamicsError, PathTrack, VehicleParams,
};
use crate::geom::Pose;
use crate::map::{builtin, MapError, ReferencePath, ScenarioMap};
use crate::observation::{
    build_observation, Observation, ObservationConfig, ObservationError, ObservationLayout, World,
};

pub use log::{read_log, AgentRecord, FlagRecord, StepRecord, TrajectoryWriter};

/// Reset placement gives up after this many rejected samples per agent.
pub const MAX_RESET_ATTEMPTS: usize = 1000;
/// Minimum CG spacing after a reset, as a multiple of the body diagonal.
pub const FEASIBILITY_FACTOR: f64 = 1.2;
/// Half-width (m) of the arc-length window searched when re-tracking an agent.
pub const TRACKING_WINDOW: f64 = 0.5;

#[derive(Debug, thiserror::Error)]
pub enum EnvError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("invalid environment config: {0}")]
    Config(String),
    #[error("expected {want} actions, got {got}")]
    ActionCount { got: usize, want: usize },
    #[error("agent {agent}: {source}")]
    Action { agent: usize, source: DynamicsError },
    #[error(
        "map `{scenario}` too crowded: could not place agent {agent} after {MAX_RESET_ATTEMPTS} attempts"
    )]
    Crowded { scenario: String, agent: usize },
    #[error(transparent)]
    Observation(#[from] ObservationError),
    #[error("cannot read config {path}: {message}")]
    ConfigFile { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResetMode {
    /// Any collision resets every agent.
    TrainResetAll,
    /// Only agents with a raised flag are reset.
    #[default]
    TestResetColliders,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardWeights {
    pub progress: f64,
    pub deviation: f64,
    pub agent_collision: f64,
    pub lane_collision: f64,
    pub time: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self {
            progress: 10.0,
            deviation: 2.0,
            agent_collision: 20.0,
            lane_collision: 20.0,
            time: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    /// Shipped map name or path to a JSON map file.
    pub scenario: String,
    pub num_agents: usize,
    pub dt: f64,
    pub obs: ObservationConfig,
    pub vehicle: VehicleParams,
    pub seed: u64,
    pub reset_mode: ResetMode,
    pub batch_size: usize,
    /// Discount factor, carried as metadata for trainers.
    pub gamma: f64,
    pub reward: RewardWeights,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            scenario: builtin::SCENARIO_NAMES[0].to_string(),
            num_agents: 4,
            dt: 0.05,
            obs: ObservationConfig::default(),
            vehicle: VehicleParams::default(),
            seed: 0,
            reset_mode: ResetMode::TestResetColliders,
            batch_size: 1,
            gamma: 0.99,
            reward: RewardWeights::default(),
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        let bad = |m: &str| Err(EnvError::Config(m.to_string()));
        if self.num_agents == 0 {
            return bad("num_agents must be at least 1");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1]");
        }
        self.vehicle
            .validate()
            .map_err(|e| EnvError::Config(e.to_string()))
    }

    /// Reads a `.toml` or `.json` config file.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, EnvError> {
        let path = path.as_ref();
        let err = |message: String| EnvError::ConfigFile {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        let cfg: EnvConfig = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| err(e.to_string()))?
        } else {
            serde_json::from_str(&text).map_err(|e| err(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Everything that evolves during an episode.
#[derive(Debug, Clone)]
pub struct WorldState {
    pub agents: Vec<AgentState>,
    /// Steps taken since construction.
    pub t: u64,
    pub rng: ChaCha8Rng,
}

/// Result of one joint step. Agent states are reported after reset handling;
/// flags and rewards describe the transition that led into the step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutput {
    pub t: u64,
    pub observations: Vec<Observation>,
    pub rewards: Vec<f64>,
    pub flags: Vec<CollisionFlags>,
    pub reset: Vec<bool>,
    /// Actions after clamping, as applied.
    pub actions: Vec<Action>,
    pub states: Vec<AgentState>,
}

impl StepOutput {
    pub fn reset_ids(&self) -> Vec<usize> {
        self.reset
            .iter()
            .enumerate()
            .filter(|(_, &r)| r)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Reward for one agent's transition `pre -> post` on `path`.
pub fn compute_reward(
    pre: &AgentState,
    post: &AgentState,
    flags: CollisionFlags,
    path: &ReferencePath,
    w: &RewardWeights,
) -> f64 {
    let progress = path.arc_delta(pre.track.s, post.track.s);
    w.progress * progress
        - w.deviation * post.track.lateral.abs()
        - w.agent_collision * f64::from(u8::from(flags.agent_agent))
        - w.lane_collision * f64::from(u8::from(flags.agent_lane))
        - w.time
}

/// Collision flags for every agent in `agents`.
pub fn collision_flags(
    map: &ScenarioMap,
    agents: &[AgentState],
    vehicle: &VehicleParams,
) -> Vec<CollisionFlags> {
    let fps: Vec<Footprint> = agents.iter().map(|a| footprint(a, vehicle)).collect();
    let aa = agent_agent_flags(&fps, vehicle.diagonal());
    agents
        .iter()
        .zip(&fps)
        .zip(aa)
        .map(|((a, fp), agent_agent)| {
            let path = &map.reference_paths[a.track.path];
            let lanelet = &map.lanelets[path.lanelet_of_segment(a.track.segment)];
            CollisionFlags {
                agent_agent,
                agent_lane: rect_polyline_collision(fp, &lanelet.left_boundary)
                    || rect_polyline_collision(fp, &lanelet.right_boundary),
            }
        })
        .collect()
}

/// Re-tracks `state` along its path near the previous arc length.
fn retrack(state: &mut AgentState, path: &ReferencePath) {
    let p = path.project_near(state.position(), state.track.s, TRACKING_WINDOW);
    state.track.s = p.s;
    state.track.segment = p.segment;
    state.track.lateral = p.lateral;
}

/// Places the agents in `which` by rejection sampling, keeping every other agent fixed.
pub fn reset_agents(
    map: &ScenarioMap,
    agents: &mut [AgentState],
    which: &[usize],
    vehicle: &VehicleParams,
    rng: &mut ChaCha8Rng,
) -> Result<(), usize> {
    let min_gap = FEASIBILITY_FACTOR * vehicle.diagonal();
    let mut placed: Vec<bool> = vec![true; agents.len()];
    for &i in which {
        placed[i] = false;
    }
    for &i in which {
        let mut ok = false;
        for _ in 0..MAX_RESET_ATTEMPTS {
            let path_idx = rng.random_range(0..map.reference_paths.len());
            let path = &map.reference_paths[path_idx];
            let s = rng.random_range(0.0..path.length());
            let pos = path.center_line.point_at(s);
            let clear = agents
                .iter()
                .zip(&placed)
                .all(|(a, &p)| !p || a.position().distance(pos) >= min_gap);
            if clear {
                agents[i] = AgentState {
                    pose: Pose::new(pos.x, pos.y, path.center_line.tangent_at(s).angle()),
                    speed: 0.0,
                    steering: 0.0,
                    track: PathTrack {
                        path: path_idx,
                        s,
                        segment: path.segment_at(s),
                        lateral: 0.0,
                    },
                };
                placed[i] = true;
                ok = true;
                break;
            }
        }
        if !ok {
            return Err(i);
        }
    }
    Ok(())
}

/// A single environment instance.
#[derive(Debug, Clone)]
pub struct Env {
    map: Arc<ScenarioMap>,
    cfg: EnvConfig,
    layout: ObservationLayout,
    world: WorldState,
    observations: Vec<Observation>,
}

impl Env {
    pub fn new(cfg: EnvConfig) -> Result<Self, EnvError> {
        cfg.validate()?;
        let map = Arc::new(builtin::resolve(&cfg.scenario)?);
        Self::with_map(cfg, map)
    }

    /// Builds an instance over an already loaded map and performs the initial reset.
    pub fn with_map(cfg: EnvConfig, map: Arc<ScenarioMap>) -> Result<Self, EnvError> {
        cfg.validate()?;
        if map.reference_paths.is_empty() {
            return Err(EnvError::Config(format!(
                "map `{}` has no reference paths",
                map.name
            )));
        }
        let world = WorldState {
            agents: vec![AgentState::default(); cfg.num_agents],
            t: 0,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        };
        let layout = ObservationLayout::new(&cfg.obs);
        let mut env = Self {
            map,
            cfg,
            layout,
            world,
            observations: Vec::new(),
        };
        env.reset(None)?;
        Ok(env)
    }

    pub fn map(&self) -> &ScenarioMap {
        &self.map
    }

    pub fn shared_map(&self) -> Arc<ScenarioMap> {
        Arc::clone(&self.map)
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn layout(&self) -> &ObservationLayout {
        &self.layout
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.world.agents
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    /// Resets every agent. With `seed`, the RNG is reseeded first.
    pub fn reset(&mut self, seed: Option<u64>) -> Result<&[Observation], EnvError> {
        if let Some(seed) = seed {
            self.world.rng = ChaCha8Rng::seed_from_u64(seed);
        }
        let all: Vec<usize> = (0..self.cfg.num_agents).collect();
        self.reset_subset(&all)?;
        self.observations = self.build_observations()?;
        Ok(&self.observations)
    }

    fn reset_subset(&mut self, which: &[usize]) -> Result<(), EnvError> {
        reset_agents(
            &self.map,
            &mut self.world.agents,
            which,
            &self.cfg.vehicle,
            &mut self.world.rng,
        )
        .map_err(|agent| EnvError::Crowded {
            scenario: self.map.name.clone(),
            agent,
        })
    }

    fn build_observations(&self) -> Result<Vec<Observation>, EnvError> {
        let world = World {
            map: &self.map,
            agents: &self.world.agents,
            vehicle: &self.cfg.vehicle,
        };
        (0..self.world.agents.len())
            .map(|i| build_observation(i, &world, &self.cfg.obs).map_err(EnvError::from))
            .collect()
    }

    pub fn step(&mut self, actions: &[Action]) -> Result<StepOutput, EnvError> {
        let n = self.world.agents.len();
        if actions.len() != n {
            return Err(EnvError::ActionCount {
                got: actions.len(),
                want: n,
            });
        }
        let applied = actions
            .iter()
            .enumerate()
            .map(|(agent, &a)| {
                clamp_action(a, &self.cfg.vehicle)
                    .map_err(|source| EnvError::Action { agent, source })
            })
            .collect::<Result<Vec<_>, _>>()?;

        let pre = self.world.agents.clone();
        let mut post: Vec<AgentState> = pre
            .iter()
            .zip(&applied)
            .map(|(s, &a)| step_kinematics(s, a, self.cfg.dt, &self.cfg.vehicle))
            .collect();
        for s in &mut post {
            retrack(s, &self.map.reference_paths[s.track.path]);
        }
        let flags = collision_flags(&self.map, &post, &self.cfg.vehicle);
        let rewards: Vec<f64> = (0..n)
            .map(|i| {
                let path = &self.map.reference_paths[post[i].track.path];
                compute_reward(&pre[i], &post[i], flags[i], path, &self.cfg.reward)
            })
            .collect();

        self.world.agents = post;
        self.world.t += 1;
        let reset: Vec<bool> = match self.cfg.reset_mode {
            ResetMode::TrainResetAll => vec![flags.iter().any(CollisionFlags::any); n],
            ResetMode::TestResetColliders => flags.iter().map(CollisionFlags::any).collect(),
        };
        let which: Vec<usize> = (0..n).filter(|&i| reset[i]).collect();
        if !which.is_empty() {
            self.reset_subset(&which)?;
        }
        self.observations = self.build_observations()?;
        Ok(StepOutput {
            t: self.world.t,
            observations: self.observations.clone(),
            rewards,
            flags,
            reset,
            actions: applied,
            states: self.world.agents.clone(),
        })
    }
}

/// Several independent instances over one shared map.
#[derive(Debug, Clone)]
pub struct BatchedEnv {
    envs: Vec<Env>,
}

impl BatchedEnv {
    pub fn new(cfg: EnvConfig) -> Result<Self, EnvError> {
        cfg.validate()?;
        let map = Arc::new(builtin::resolve(&cfg.scenario)?);
        Self::with_map(cfg, map)
    }

    pub fn with_map(cfg: EnvConfig, map: Arc<ScenarioMap>) -> Result<Self, EnvError> {
        let envs = (0..cfg.batch_size)
            .map(|e| {
                let instance = EnvConfig {
                    seed: cfg.seed.wrapping_add(e as u64),
                    ..cfg.clone()
                };
                Env::with_map(instance, Arc::clone(&map))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { envs })
    }

    pub fn len(&self) -> usize {
        self.envs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.envs.is_empty()
    }

    pub fn instances(&self) -> &[Env] {
        &self.envs
    }

    pub fn instance_mut(&mut self, e: usize) -> &mut Env {
        &mut self.envs[e]
    }

    /// Resets every instance; with `seed`, instance `e` is reseeded with `seed + e`.
    pub fn reset(&mut self, seed: Option<u64>) -> Result<Vec<Vec<Observation>>, EnvError> {
        self.envs
            .iter_mut()
            .enumerate()
            .map(|(e, env)| Ok(env.reset(seed.map(|s| s.wrapping_add(e as u64)))?.to_vec()))
            .collect()
    }

    /// Steps every instance with its own joint action.
    pub fn step(&mut self, actions: &[Vec<Action>]) -> Result<Vec<StepOutput>, EnvError> {
        if actions.len() != self.envs.len() {
            return Err(EnvError::ActionCount {
                got: actions.len(),
                want: self.envs.len(),
            });
        }
        self.envs
            .iter_mut()
            .zip(actions)
            .map(|(env, a)| env.step(a))
            .collect()
    }
}

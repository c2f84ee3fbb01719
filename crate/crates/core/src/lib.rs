//! Deterministic, batched multi-agent driving environment.
//!
//! Agents are kinematic single-track vehicles following reference paths on a
//! lanelet map. Each agent receives a compact structured observation (ego-view
//! reference points, lane-boundary and center-line distances, neighbor
//! footprint vertices and distances); five ablation variants drop one of those
//! ingredients each. An evaluation harness runs seeded campaigns, logs
//! trajectories and reduces them to collision rate, center-line deviation,
//! average speed and a composite score.
//!
//! Modules:
//!   - [`map`]: lanelet maps, polyline queries, scenario loading
//!   - [`dynamics`]: kinematic single-track model
//!   - [`collision`]: oriented-rectangle footprints and intersection tests
//!   - [`observation`]: observation builder and layouts (M0 to M5)
//!   - [`env`]: stepping, resets, rewards, trajectory logs
//!   - [`metrics`]: per-simulation metrics and composite scores
//!   - [`policy`]: policy interface and scripted baselines
//!   - [`harness`]: evaluation campaigns, score reports, replay rendering

pub mod collision;
pub mod dynamics;
pub mod env;
pub mod geom;
pub mod harness;
pub mod map;
pub mod metrics;
pub mod observation;
pub mod policy;

pub use geom::{Pose, Vec2};

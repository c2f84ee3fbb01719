//! Per-agent observation vectors.
//!
//! An observation is a self block followed by `n_sur` neighbor blocks, nearest
//! first. Variant [`Variant::M0`] uses every ingredient:
//!
//! | block            | M0 content                                   | size      |
//! |------------------|----------------------------------------------|-----------|
//! | self             | speed, d_CL, d_LB, d_RB, reference points     | 4 + 2·n_ref |
//! | neighbor         | 4 footprint vertices, relative velocity, distance | 11     |
//!
//! All points and vectors are expressed in the ego frame (origin at the CG,
//! x along the heading). The other variants each drop one ingredient:
//!
//! - `M1` global frame instead of ego frame; the self block gains `x, y, cos psi, sin psi`
//! - `M2` neighbor pose and dimensions instead of vertices (9 per neighbor)
//! - `M3` no neighbor distance (10 per neighbor)
//! - `M4` sampled boundary points instead of `d_LB`, `d_RB`
//! - `M5` no `d_CL`
//!
//! Missing neighbors are padded with a placeholder 100 m straight ahead,
//! moving with the ego vehicle.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::collision::{agent_distance, footprint, footprint_polyline_distance, DistanceMode};
use crate::dynamics::{AgentState, VehicleParams};
use crate::geom::{Pose, Vec2};
use crate::map::{boundary_distances, ReferencePath, ScenarioMap};

/// Distance of the padding placeholder used when fewer than `n_sur` neighbors exist.
pub const SENTINEL_DISTANCE: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ObservationError {
    #[error("agent {agent} is assigned reference path {path}, which does not exist")]
    MissingPath { agent: usize, path: usize },
    #[error("agent {agent} has segment index {segment} outside its path")]
    BadSegment { agent: usize, segment: usize },
    #[error("ego agent {0} does not exist")]
    UnknownAgent(usize),
    #[error("normalization has {got} entries, layout needs {want}")]
    NormalizationSize { got: usize, want: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Variant {
    #[default]
    M0,
    M1,
    M2,
    M3,
    M4,
    M5,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::M0,
        Variant::M1,
        Variant::M2,
        Variant::M3,
        Variant::M4,
        Variant::M5,
    ];

    pub fn ego_view(self) -> bool {
        self != Variant::M1
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown observation variant `{s}` (expected M0..M5)"))
    }
}

/// Where lane-boundary distances are measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    #[default]
    Cg,
    Footprint,
}

/// Optional affine map applied elementwise: `(value - offset) * scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub offset: Vec<f64>,
    pub scale: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObservationConfig {
    pub variant: Variant,
    pub n_sur: usize,
    pub n_ref: usize,
    /// Boundary points per side (M4 only).
    pub n_bnd: usize,
    /// Arc-length spacing of the short-term reference points (m).
    pub ref_spacing: f64,
    pub distance_mode: DistanceMode,
    pub boundary_mode: BoundaryMode,
    pub normalization: Option<Normalization>,
}

impl Default for ObservationConfig {
    fn default() -> Self {
        Self {
            variant: Variant::M0,
            n_sur: 2,
            n_ref: 3,
            n_bnd: 3,
            ref_spacing: 0.1,
            distance_mode: DistanceMode::Cg,
            boundary_mode: BoundaryMode::Cg,
            normalization: None,
        }
    }
}

impl ObservationConfig {
    pub fn with_variant(variant: Variant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub offset: usize,
    pub length: usize,
}

/// Named slices of an observation vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationLayout {
    pub variant: Variant,
    pub blocks: Vec<Block>,
}

impl ObservationLayout {
    pub fn new(cfg: &ObservationConfig) -> Self {
        let mut blocks = Vec::new();
        let mut offset = 0;
        let mut push = |name: String, length: usize| {
            blocks.push(Block {
                name,
                offset,
                length,
            });
            offset += length;
        };
        let v = cfg.variant;
        if v == Variant::M1 {
            push("ego_pose".into(), 4);
        }
        push("speed".into(), 1);
        if v != Variant::M5 {
            push("d_cl".into(), 1);
        }
        if v != Variant::M4 {
            push("d_lb".into(), 1);
            push("d_rb".into(), 1);
        }
        push("ref_points".into(), 2 * cfg.n_ref);
        if v == Variant::M4 {
            push("left_boundary_points".into(), 2 * cfg.n_bnd);
            push("right_boundary_points".into(), 2 * cfg.n_bnd);
        }
        for j in 0..cfg.n_sur {
            if v == Variant::M2 {
                push(format!("neighbor{j}.pose"), 4);
                push(format!("neighbor{j}.dims"), 2);
            } else {
                push(format!("neighbor{j}.vertices"), 8);
            }
            push(format!("neighbor{j}.rel_velocity"), 2);
            if v != Variant::M3 {
                push(format!("neighbor{j}.distance"), 1);
            }
        }
        Self { variant: v, blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.offset + b.length)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }

    /// Slice of `values` covered by block `name`.
    pub fn slice<'a>(&self, values: &'a [f64], name: &str) -> Option<&'a [f64]> {
        let b = self.block(name)?;
        values.get(b.offset..b.offset + b.length)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("layout serializes")
    }
}

/// Expected observation length for a configuration, from the layout arithmetic.
pub fn observation_size(variant: Variant, n_ref: usize, n_sur: usize, n_bnd: usize) -> usize {
    let self_len = match variant {
        Variant::M0 | Variant::M2 | Variant::M3 => 4 + 2 * n_ref,
        Variant::M1 => 8 + 2 * n_ref,
        Variant::M4 => 2 + 2 * n_ref + 4 * n_bnd,
        Variant::M5 => 3 + 2 * n_ref,
    };
    let neighbor_len = match variant {
        Variant::M2 => 9,
        Variant::M3 => 10,
        _ => 11,
    };
    self_len + neighbor_len * n_sur
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub values: Vec<f64>,
}

/// One slot of the neighbor list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborSlot {
    Agent(usize),
    /// Padding when fewer than `n_sur` other agents exist.
    Sentinel,
}

/// Everything an observation reads: map, all agent states and the shared vehicle parameters.
#[derive(Debug, Clone, Copy)]
pub struct World<'a> {
    pub map: &'a ScenarioMap,
    pub agents: &'a [AgentState],
    pub vehicle: &'a VehicleParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    Point,
    Vector,
}

/// Expresses a world point or vector in the ego body frame.
pub fn ego_frame_transform(ego: Pose, p: Vec2, kind: FrameKind) -> Vec2 {
    match kind {
        FrameKind::Point => ego.to_local_point(p),
        FrameKind::Vector => ego.to_local_vector(p),
    }
}

/// The `n_sur` agents nearest to `ego` by CG distance; ties go to the smaller id.
pub fn select_neighbors(ego: usize, agents: &[AgentState], n_sur: usize) -> Vec<NeighborSlot> {
    let origin = agents[ego].position();
    select_by(ego, agents.len(), n_sur, |j| {
        origin.distance(agents[j].position())
    })
}

fn select_by(ego: usize, n: usize, n_sur: usize, dist: impl Fn(usize) -> f64) -> Vec<NeighborSlot> {
    let mut others: Vec<(f64, usize)> =
        (0..n).filter(|&j| j != ego).map(|j| (dist(j), j)).collect();
    others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut slots: Vec<NeighborSlot> = others
        .into_iter()
        .take(n_sur)
        .map(|(_, j)| NeighborSlot::Agent(j))
        .collect();
    slots.resize(n_sur, NeighborSlot::Sentinel);
    slots
}

fn path_of<'a>(world: &World<'a>, agent: usize) -> Result<&'a ReferencePath, ObservationError> {
    let track = world.agents[agent].track;
    let path = world
        .map
        .reference_paths
        .get(track.path)
        .ok_or(ObservationError::MissingPath {
            agent,
            path: track.path,
        })?;
    if track.segment >= path.center_line.segment_count() {
        return Err(ObservationError::BadSegment {
            agent,
            segment: track.segment,
        });
    }
    Ok(path)
}

/// Builds agent `ego`'s observation under `cfg`.
pub fn build_observation(
    ego: usize,
    world: &World<'_>,
    cfg: &ObservationConfig,
) -> Result<Observation, ObservationError> {
    let me = world
        .agents
        .get(ego)
        .ok_or(ObservationError::UnknownAgent(ego))?;
    let path = path_of(world, ego)?;
    let lanelet = &world.map.lanelets[path.lanelet_of_segment(me.track.segment)];
    let v = cfg.variant;
    let ego_view = v.ego_view();
    let pose = me.pose;
    let point = |p: Vec2| if ego_view { pose.to_local_point(p) } else { p };
    let vector = |p: Vec2| if ego_view { pose.to_local_vector(p) } else { p };

    let mut out = Vec::with_capacity(observation_size(v, cfg.n_ref, cfg.n_sur, cfg.n_bnd));
    let push_pt = |out: &mut Vec<f64>, p: Vec2| {
        out.push(p.x);
        out.push(p.y);
    };

    if v == Variant::M1 {
        out.extend([pose.x, pose.y, pose.yaw.cos(), pose.yaw.sin()]);
    }
    out.push(me.speed);
    if v != Variant::M5 {
        out.push(me.track.lateral);
    }
    if v != Variant::M4 {
        let (d_lb, d_rb) = match cfg.boundary_mode {
            BoundaryMode::Cg => boundary_distances(me.position(), lanelet),
            BoundaryMode::Footprint => {
                let fp = footprint(me, world.vehicle);
                (
                    footprint_polyline_distance(&fp, &lanelet.left_boundary),
                    footprint_polyline_distance(&fp, &lanelet.right_boundary),
                )
            }
        };
        out.push(d_lb);
        out.push(d_rb);
    }
    for p in path.sample_ahead(me.track.s, cfg.n_ref, cfg.ref_spacing) {
        push_pt(&mut out, point(p));
    }
    if v == Variant::M4 {
        let stations: Vec<(Vec2, usize)> = (1..=cfg.n_bnd)
            .map(|k| {
                let s = path.normalize_s(me.track.s + k as f64 * cfg.ref_spacing);
                let seg = path.segment_at(s);
                (path.center_line.point_at(s), path.lanelet_of_segment(seg))
            })
            .collect();
        for left in [true, false] {
            for &(c, li) in &stations {
                let l = &world.map.lanelets[li];
                let boundary = if left {
                    &l.left_boundary
                } else {
                    &l.right_boundary
                };
                push_pt(&mut out, point(boundary.project(c).foot));
            }
        }
    }

    let slots = match cfg.distance_mode {
        DistanceMode::Cg => select_neighbors(ego, world.agents, cfg.n_sur),
        mode => select_by(ego, world.agents.len(), cfg.n_sur, |j| {
            agent_distance(me, &world.agents[j], mode, world.vehicle)
        }),
    };
    let my_velocity = me.velocity(world.vehicle);
    for slot in slots {
        let (other, distance) = match slot {
            NeighborSlot::Agent(j) => {
                let o = world.agents[j];
                (o, agent_distance(me, &o, cfg.distance_mode, world.vehicle))
            }
            NeighborSlot::Sentinel => {
                let ahead = pose.position() + Vec2::from_angle(pose.yaw) * SENTINEL_DISTANCE;
                let phantom = AgentState {
                    pose: Pose::new(ahead.x, ahead.y, pose.yaw),
                    ..*me
                };
                (phantom, SENTINEL_DISTANCE)
            }
        };
        if v == Variant::M2 {
            push_pt(&mut out, point(other.position()));
            let rel_yaw = if ego_view {
                other.pose.yaw - pose.yaw
            } else {
                other.pose.yaw
            };
            out.extend([
                rel_yaw.cos(),
                rel_yaw.sin(),
                world.vehicle.length,
                world.vehicle.width,
            ]);
        } else {
            for c in footprint(&other, world.vehicle).vertices {
                push_pt(&mut out, point(c));
            }
        }
        let rel = match slot {
            NeighborSlot::Agent(_) => other.velocity(world.vehicle) - my_velocity,
            NeighborSlot::Sentinel => Vec2::ZERO,
        };
        push_pt(&mut out, vector(rel));
        if v != Variant::M3 {
            out.push(distance);
        }
    }

    if let Some(norm) = &cfg.normalization {
        if norm.offset.len() != out.len() || norm.scale.len() != out.len() {
            return Err(ObservationError::NormalizationSize {
                got: norm.offset.len().min(norm.scale.len()),
                want: out.len(),
            });
        }
        for ((x, o), s) in out.iter_mut().zip(&norm.offset).zip(&norm.scale) {
            *x = (*x - o) * s;
        }
    }
    Ok(Observation { values: out })
}

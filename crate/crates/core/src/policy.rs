//! Policy interface and scripted baselines.
//!
//! Policies read only the observation vector. [`PurePursuit`] steers towards
//! the farthest short-term reference point and slows down for neighbors it
//! should not hit; [`RandomPolicy`] samples uniformly from the action box.

use rand::{Rng, RngCore};

use crate::dynamics::{Action, VehicleParams};
use crate::geom::Vec2;
use crate::observation::{Observation, ObservationLayout, Variant, SENTINEL_DISTANCE};

pub const POLICY_NAMES: [&str; 3] = ["pure_pursuit", "random", "stationary"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolicyError {
    #[error("unknown policy `{0}` (expected one of pure_pursuit, random, stationary)")]
    Unknown(String),
    #[error("policy `{policy}` cannot use observation variant {variant}: {reason}")]
    Layout {
        policy: &'static str,
        variant: Variant,
        reason: String,
    },
    #[error("observation has {got} values, layout expects {want}")]
    Size { got: usize, want: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyDescriptor {
    pub name: String,
    /// Observation variant the policy was built for.
    pub variant: Variant,
}

pub trait Policy: Send + Sync {
    fn descriptor(&self) -> PolicyDescriptor;

    fn act(&self, obs: &Observation, rng: &mut dyn RngCore) -> Result<Action, PolicyError>;
}

/// Tuning knobs for [`PurePursuit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurePursuitParams {
    /// Neighbor distance below which speed is reduced (m).
    pub slow_radius: f64,
    /// Neighbor distance at which speed reaches zero (m).
    pub stop_radius: f64,
    /// Half-width of the corridor ahead in which a neighbor is followed (m).
    pub corridor: f64,
    /// Conflict points farther ahead than this are ignored (m).
    pub conflict_horizon: f64,
    /// Extra clearance kept at crossings (m).
    pub margin: f64,
}

impl PurePursuitParams {
    pub fn for_vehicle(v: &VehicleParams) -> Self {
        Self {
            slow_radius: 0.3,
            stop_radius: v.diagonal(),
            corridor: 0.12,
            conflict_horizon: 0.6,
            margin: 0.03,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum NeighborSource {
    Vertices,
    Pose,
}

/// Geometric pure-pursuit lane follower.
#[derive(Debug, Clone)]
pub struct PurePursuit {
    layout: ObservationLayout,
    vehicle: VehicleParams,
    params: PurePursuitParams,
    lookahead: usize,
    neighbors: Vec<(usize, NeighborSource)>,
}

/// A neighbor as seen from the ego frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborView {
    pub position: Vec2,
    pub heading: f64,
}

impl PurePursuit {
    pub fn new(layout: &ObservationLayout, vehicle: &VehicleParams) -> Result<Self, PolicyError> {
        Self::with_params(layout, vehicle, PurePursuitParams::for_vehicle(vehicle))
    }

    pub fn with_params(
        layout: &ObservationLayout,
        vehicle: &VehicleParams,
        params: PurePursuitParams,
    ) -> Result<Self, PolicyError> {
        let bad = |reason: &str| PolicyError::Layout {
            policy: "pure_pursuit",
            variant: layout.variant,
            reason: reason.to_string(),
        };
        if !layout.variant.ego_view() {
            return Err(bad("needs ego-frame observations"));
        }
        let refs = layout
            .block("ref_points")
            .ok_or_else(|| bad("no reference points"))?;
        if refs.length < 2 {
            return Err(bad("needs at least one reference point"));
        }
        let mut neighbors = Vec::new();
        for j in 0.. {
            if let Some(b) = layout.block(&format!("neighbor{j}.vertices")) {
                neighbors.push((b.offset, NeighborSource::Vertices));
            } else if let Some(b) = layout.block(&format!("neighbor{j}.pose")) {
                neighbors.push((b.offset, NeighborSource::Pose));
            } else {
                break;
            }
        }
        Ok(Self {
            layout: layout.clone(),
            vehicle: *vehicle,
            params,
            lookahead: refs.offset + refs.length - 2,
            neighbors,
        })
    }

    /// Steering towards an ego-frame goal point.
    pub fn steering_for(&self, goal: Vec2) -> f64 {
        let d2 = goal.norm_sq();
        if d2 == 0.0 {
            return 0.0;
        }
        let delta = (2.0 * self.vehicle.wheelbase * goal.y / d2).atan();
        delta.clamp(-self.vehicle.max_steering, self.vehicle.max_steering)
    }

    /// Real (non-padding) neighbors decoded from the observation.
    pub fn neighbor_views(&self, values: &[f64]) -> Vec<NeighborView> {
        self.neighbors
            .iter()
            .filter_map(|&(off, src)| {
                let view = match src {
                    NeighborSource::Vertices => {
                        let v: Vec<Vec2> = (0..4)
                            .map(|k| Vec2::new(values[off + 2 * k], values[off + 2 * k + 1]))
                            .collect();
                        let centre = (v[0] + v[1] + v[2] + v[3]) * 0.25;
                        NeighborView {
                            position: centre,
                            heading: (v[0] - v[3]).angle(),
                        }
                    }
                    NeighborSource::Pose => NeighborView {
                        position: Vec2::new(values[off], values[off + 1]),
                        heading: values[off + 3].atan2(values[off + 2]),
                    },
                };
                (view.position.norm() < 0.5 * SENTINEL_DISTANCE).then_some(view)
            })
            .collect()
    }

    /// Effective gap to the most constraining neighbor, or `None` when the road is clear.
    pub fn constraining_gap(&self, neighbors: &[NeighborView]) -> Option<f64> {
        let p = &self.params;
        let mut gap: Option<f64> = None;
        let mut keep = |d: f64| gap = Some(gap.map_or(d, |g: f64| g.min(d)));
        for n in neighbors {
            let pos = n.position;
            let dir = Vec2::from_angle(n.heading);
            let ahead = pos.x > 0.0 && pos.y.abs() < p.corridor;
            if ahead && dir.x > 0.0 {
                keep(pos.norm());
                continue;
            }
            // where the two heading rays meet: ego reaches it after `mine`, the neighbor after `theirs`
            if dir.y.abs() < 1e-6 {
                if ahead {
                    keep(pos.norm());
                }
                continue;
            }
            let theirs = -pos.y / dir.y;
            let mine = pos.x + theirs * dir.x;
            if mine <= 0.0 || theirs < -self.crossing_clearance(dir) || mine > p.conflict_horizon {
                continue;
            }
            if mine > theirs {
                keep(mine - self.crossing_clearance(dir) + p.stop_radius);
            }
        }
        gap
    }

    /// Distance from a conflict point at which the ego front clears a neighbor
    /// crossing with direction `dir`.
    fn crossing_clearance(&self, dir: Vec2) -> f64 {
        let (hl, hw) = (0.5 * self.vehicle.length, 0.5 * self.vehicle.width);
        hl + (hw + hl * dir.x.abs()) / dir.y.abs().max(0.25) + self.params.margin
    }

    pub fn speed_for_gap(&self, gap: Option<f64>) -> f64 {
        let v_max = self.vehicle.max_speed;
        match gap {
            None => v_max,
            Some(d) => {
                let p = &self.params;
                v_max * ((d - p.stop_radius) / (p.slow_radius - p.stop_radius)).clamp(0.0, 1.0)
            }
        }
    }

    pub fn act_on(&self, values: &[f64]) -> Result<Action, PolicyError> {
        let want = self.layout.len();
        if values.len() != want {
            return Err(PolicyError::Size {
                got: values.len(),
                want,
            });
        }
        let goal = Vec2::new(values[self.lookahead], values[self.lookahead + 1]);
        let steering = self.steering_for(goal);
        let gap = self.constraining_gap(&self.neighbor_views(values));
        Ok(Action::new(self.speed_for_gap(gap), steering))
    }
}

impl Policy for PurePursuit {
    fn descriptor(&self) -> PolicyDescriptor {
        PolicyDescriptor {
            name: "pure_pursuit".into(),
            variant: self.layout.variant,
        }
    }

    fn act(&self, obs: &Observation, _rng: &mut dyn RngCore) -> Result<Action, PolicyError> {
        self.act_on(&obs.values)
    }
}

/// Uniform samples from the action box.
#[derive(Debug, Clone)]
pub struct RandomPolicy {
    variant: Variant,
    vehicle: VehicleParams,
}

impl RandomPolicy {
    pub fn new(variant: Variant, vehicle: &VehicleParams) -> Self {
        Self {
            variant,
            vehicle: *vehicle,
        }
    }
}

impl Policy for RandomPolicy {
    fn descriptor(&self) -> PolicyDescriptor {
        PolicyDescriptor {
            name: "random".into(),
            variant: self.variant,
        }
    }

    fn act(&self, _obs: &Observation, rng: &mut dyn RngCore) -> Result<Action, PolicyError> {
        let v = &self.vehicle;
        Ok(Action::new(
            rng.random_range(v.min_speed..=v.max_speed),
            rng.random_range(-v.max_steering..=v.max_steering),
        ))
    }
}

/// Always commands zero speed and steering.
#[derive(Debug, Clone)]
pub struct Stationary {
    variant: Variant,
}

impl Policy for Stationary {
    fn descriptor(&self) -> PolicyDescriptor {
        PolicyDescriptor {
            name: "stationary".into(),
            variant: self.variant,
        }
    }

    fn act(&self, _obs: &Observation, _rng: &mut dyn RngCore) -> Result<Action, PolicyError> {
        Ok(Action::default())
    }
}

/// Builds a policy by name for observations with `layout`.
pub fn policy_by_name(
    name: &str,
    layout: &ObservationLayout,
    vehicle: &VehicleParams,
) -> Result<Box<dyn Policy>, PolicyError> {
    match name {
        "pure_pursuit" => Ok(Box::new(PurePursuit::new(layout, vehicle)?)),
        "random" => Ok(Box::new(RandomPolicy::new(layout.variant, vehicle))),
        "stationary" => Ok(Box::new(Stationary {
            variant: layout.variant,
        })),
        other => Err(PolicyError::Unknown(other.to_string())),
    }
}

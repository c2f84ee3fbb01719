//! Oriented-rectangle footprints and the collision tests built on them.

use serde::{Deserialize, Serialize};

use crate::dynamics::{AgentState, VehicleParams};
use crate::geom::{
    point_segment_distance, segment_segment_distance, segments_intersect, Pose, Vec2,
};
use crate::map::Polyline;

/// Corners of an agent's body rectangle in world coordinates, ordered
/// front-left, front-right, rear-right, rear-left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint {
    pub vertices: [Vec2; 4],
}

impl Footprint {
    pub fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        (0..4).map(move |i| (self.vertices[i], self.vertices[(i + 1) % 4]))
    }

    pub fn centroid(&self) -> Vec2 {
        let s = self.vertices.iter().fold(Vec2::ZERO, |acc, &v| acc + v);
        s * 0.25
    }

    /// Strict interior test.
    pub fn contains_strict(&self, p: Vec2) -> bool {
        let side = |(a, b): (Vec2, Vec2)| (b - a).cross(p - a);
        self.edges().all(|e| side(e) > 0.0) || self.edges().all(|e| side(e) < 0.0)
    }

    /// The two unique edge directions' normals.
    fn axes(&self) -> [Vec2; 2] {
        let v = &self.vertices;
        [(v[1] - v[0]).perp(), (v[2] - v[1]).perp()]
    }

    fn project(&self, axis: Vec2) -> (f64, f64) {
        self.vertices
            .iter()
            .map(|v| v.dot(axis))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| {
                (lo.min(d), hi.max(d))
            })
    }
}

/// Distance measure between two agents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    /// Euclidean distance between centers of gravity.
    #[default]
    Cg,
    /// Minimum gap between the two footprints, 0 when they overlap.
    MinPolygon,
}

/// Per-agent collision flags, recomputed every step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CollisionFlags {
    pub agent_agent: bool,
    pub agent_lane: bool,
}

impl CollisionFlags {
    pub fn any(&self) -> bool {
        self.agent_agent || self.agent_lane
    }
}

/// Body rectangle for a CG pose.
pub fn rectangle_vertices(pose: Pose, length: f64, width: f64) -> Footprint {
    let (hl, hw) = (0.5 * length, 0.5 * width);
    let body = [
        Vec2::new(hl, hw),
        Vec2::new(hl, -hw),
        Vec2::new(-hl, -hw),
        Vec2::new(-hl, hw),
    ];
    Footprint {
        vertices: body.map(|c| pose.to_world_point(c)),
    }
}

pub fn footprint(state: &AgentState, params: &VehicleParams) -> Footprint {
    rectangle_vertices(state.pose, params.length, params.width)
}

/// Separating-axis test over the four edge normals. Touching counts as overlap.
pub fn obb_intersect(a: &Footprint, b: &Footprint) -> bool {
    a.axes().into_iter().chain(b.axes()).all(|axis| {
        let (a_lo, a_hi) = a.project(axis);
        let (b_lo, b_hi) = b.project(axis);
        a_hi >= b_lo && b_hi >= a_lo
    })
}

/// True when any footprint edge meets a boundary segment, or a boundary vertex
/// lies strictly inside the footprint.
pub fn rect_polyline_collision(fp: &Footprint, boundary: &Polyline) -> bool {
    let reach = fp.vertices[0].distance(fp.vertices[2]) * 0.5;
    let c = fp.centroid();
    boundary.segments().any(|(p, q)| {
        if point_segment_distance(c, p, q) > reach {
            return false;
        }
        fp.edges().any(|(a, b)| segments_intersect(a, b, p, q))
    }) || boundary.points().iter().any(|&p| fp.contains_strict(p))
}

/// Minimum distance between two footprints, 0 when they intersect.
pub fn polygon_distance(a: &Footprint, b: &Footprint) -> f64 {
    if obb_intersect(a, b) {
        return 0.0;
    }
    a.edges()
        .flat_map(|(p, q)| {
            b.edges()
                .map(move |(r, s)| segment_segment_distance(p, q, r, s))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Distance between two agents under the selected measure.
pub fn agent_distance(
    a: &AgentState,
    b: &AgentState,
    mode: DistanceMode,
    params: &VehicleParams,
) -> f64 {
    match mode {
        DistanceMode::Cg => a.position().distance(b.position()),
        DistanceMode::MinPolygon => polygon_distance(&footprint(a, params), &footprint(b, params)),
    }
}

/// Minimum distance from a footprint to a polyline, 0 when they touch.
pub fn footprint_polyline_distance(fp: &Footprint, pl: &Polyline) -> f64 {
    if rect_polyline_collision(fp, pl) {
        return 0.0;
    }
    pl.segments()
        .flat_map(|(p, q)| {
            fp.edges()
                .map(move |(a, b)| segment_segment_distance(a, b, p, q))
        })
        .fold(f64::INFINITY, f64::min)
}

/// Pairwise agent-agent flags for a set of footprints. A CG prefilter skips
/// pairs further apart than one body diagonal.
pub fn agent_agent_flags(footprints: &[Footprint], diagonal: f64) -> Vec<bool> {
    let n = footprints.len();
    let mut flags = vec![false; n];
    let centers: Vec<Vec2> = footprints.iter().map(Footprint::centroid).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if centers[i].distance(centers[j]) > diagonal {
                continue;
            }
            if obb_intersect(&footprints[i], &footprints[j]) {
                flags[i] = true;
                flags[j] = true;
            }
        }
    }
    flags
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    const L: f64 = 0.16;
    const W: f64 = 0.08;

    fn close(a: Vec2, b: Vec2) -> bool {
        a.distance(b) < 1e-12
    }

    #[test]
    fn vertices_axis_aligned_and_rotated() {
        let fp = rectangle_vertices(Pose::new(0.0, 0.0, 0.0), L, W);
        let want = [(0.08, 0.04), (0.08, -0.04), (-0.08, -0.04), (-0.08, 0.04)];
        for (v, w) in fp.vertices.iter().zip(want) {
            assert!(close(*v, Vec2::new(w.0, w.1)));
        }
        let fp = rectangle_vertices(Pose::new(0.0, 0.0, FRAC_PI_2), L, W);
        let want = [(-0.04, 0.08), (0.04, 0.08), (0.04, -0.08), (-0.04, -0.08)];
        for (v, w) in fp.vertices.iter().zip(want) {
            assert!(close(*v, Vec2::new(w.0, w.1)), "{v:?} vs {w:?}");
        }
    }

    #[test]
    fn intersect_basic_cases() {
        let a = rectangle_vertices(Pose::new(0.0, 0.0, 0.3), L, W);
        assert!(obb_intersect(&a, &a));
        let far = rectangle_vertices(Pose::new(1.0, 0.0, -0.7), L, W);
        assert!(!obb_intersect(&a, &far));
        // touching along a shared edge
        let a = rectangle_vertices(Pose::new(0.0, 0.0, 0.0), L, W);
        let b = rectangle_vertices(Pose::new(0.16, 0.0, 0.0), L, W);
        assert!(obb_intersect(&a, &b));
        assert_eq!(polygon_distance(&a, &b), 0.0);
    }

    #[test]
    fn lane_boundary_cases() {
        let left = Polyline::new(vec![Vec2::new(-1.0, 0.15), Vec2::new(1.0, 0.15)]).unwrap();
        let inside = rectangle_vertices(Pose::new(0.0, 0.0, 0.0), L, W);
        assert!(!rect_polyline_collision(&inside, &left));
        let on_line = rectangle_vertices(Pose::new(0.0, 0.15, 0.0), L, W);
        assert!(rect_polyline_collision(&on_line, &left));
        // boundary vertex strictly inside, no edge crossing possible for a tiny polyline
        let tiny = Polyline::new(vec![Vec2::new(-0.01, 0.0), Vec2::new(0.01, 0.0)]).unwrap();
        assert!(rect_polyline_collision(&inside, &tiny));
    }

    #[test]
    fn distance_modes() {
        let mk = |x: f64, y: f64| AgentState {
            pose: Pose::new(x, y, 0.0),
            ..Default::default()
        };
        let p = VehicleParams::default();
        assert_eq!(
            agent_distance(&mk(0.0, 0.0), &mk(0.0, 0.0), DistanceMode::Cg, &p),
            0.0
        );
        assert!(
            (agent_distance(&mk(0.0, 0.0), &mk(0.3, 0.4), DistanceMode::Cg, &p) - 0.5).abs()
                < 1e-15
        );
        let gap = agent_distance(&mk(0.0, 0.0), &mk(0.5, 0.0), DistanceMode::MinPolygon, &p);
        assert!((gap - 0.34).abs() < 1e-12);
    }

    #[test]
    fn pairwise_flags_symmetric() {
        let fps = [
            rectangle_vertices(Pose::new(0.0, 0.0, 0.0), L, W),
            rectangle_vertices(Pose::new(0.1, 0.02, 0.5), L, W),
            rectangle_vertices(Pose::new(2.0, 0.0, 0.0), L, W),
        ];
        assert_eq!(agent_agent_flags(&fps, L.hypot(W)), vec![true, true, false]);
    }
}

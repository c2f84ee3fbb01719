//! Footprints, separating-axis overlap and the two neighbor distances.

use lanegym::collision::{agent_distance, obb_intersect, rectangle_vertices, DistanceMode};
use lanegym::dynamics::{AgentState, VehicleParams};
use lanegym::geom::Pose;

fn main() {
    let p = VehicleParams::default();
    let ego = AgentState {
        pose: Pose::new(0.0, 0.0, 0.0),
        ..Default::default()
    };
    for (x, y, yaw) in [
        (0.30, 0.0, 0.0),
        (0.15, 0.05, 0.6),
        (0.16, 0.0, 0.0),
        (0.10, 0.10, 1.57),
    ] {
        let other = AgentState {
            pose: Pose::new(x, y, yaw),
            ..Default::default()
        };
        let a = rectangle_vertices(ego.pose, p.length, p.width);
        let b = rectangle_vertices(other.pose, p.length, p.width);
        println!(
            "other at ({x:.2}, {y:.2}, {yaw:.2}): overlap {:<5} cg {:.4} m  polygon {:.4} m",
            obb_intersect(&a, &b),
            agent_distance(&ego, &other, DistanceMode::Cg, &p),
            agent_distance(&ego, &other, DistanceMode::MinPolygon, &p),
        );
    }
}

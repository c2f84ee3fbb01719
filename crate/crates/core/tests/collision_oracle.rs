mod common;

use common::{brute_overlap, corners, sampled_gap, seg_hit};
use lanegym::collision::{
    agent_agent_flags, agent_distance, obb_intersect, rect_polyline_collision, rectangle_vertices,
    DistanceMode,
};
use lanegym::dynamics::{AgentState, VehicleParams};
use lanegym::geom::{Pose, Vec2};
use lanegym::map::Polyline;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const L: f64 = 0.16;
const W: f64 = 0.08;

fn random_pose(rng: &mut impl Rng, spread: f64) -> Pose {
    Pose::new(
        rng.random_range(-spread..spread),
        rng.random_range(-spread..spread),
        rng.random_range(-3.2..3.2),
    )
}

fn near_tangent(a: Pose, b: Pose) -> bool {
    let big = brute_overlap(
        &corners(a, L + 2e-9, W + 2e-9),
        &corners(b, L + 2e-9, W + 2e-9),
    );
    let small = brute_overlap(
        &corners(a, L - 2e-9, W - 2e-9),
        &corners(b, L - 2e-9, W - 2e-9),
    );
    big != small
}

#[test]
fn sat_matches_brute_force_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut checked, mut hits) = (0, 0);
    for _ in 0..10_000 {
        let a = random_pose(&mut rng, 0.25);
        let b = random_pose(&mut rng, 0.25);
        if near_tangent(a, b) {
            continue;
        }
        let want = brute_overlap(&corners(a, L, W), &corners(b, L, W));
        let got = obb_intersect(&rectangle_vertices(a, L, W), &rectangle_vertices(b, L, W));
        assert_eq!(got, want, "{a:?} vs {b:?}");
        checked += 1;
        hits += usize::from(want);
    }
    assert!(checked > 9_900);
    assert!(
        hits > 1_000 && hits < checked - 1_000,
        "both verdicts need coverage, got {hits} overlaps"
    );
}

#[test]
fn vertices_reproduce_pose() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let pose = random_pose(&mut rng, 10.0);
        let fp = rectangle_vertices(pose, L, W);
        let c = fp.centroid();
        assert!((c.x - pose.x).abs() < 1e-12 && (c.y - pose.y).abs() < 1e-12);
        let front_mid = (fp.vertices[0] + fp.vertices[1]) * 0.5;
        let dir = (front_mid - c).angle();
        let diff = (dir - pose.yaw + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI)
            - std::f64::consts::PI;
        assert!(diff.abs() < 1e-12);
    }
}

#[test]
fn min_polygon_distance_matches_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let p = VehicleParams::default();
    for _ in 0..300 {
        let a = random_pose(&mut rng, 0.6);
        let b = random_pose(&mut rng, 0.6);
        let sa = AgentState {
            pose: a,
            ..Default::default()
        };
        let sb = AgentState {
            pose: b,
            ..Default::default()
        };
        let got = agent_distance(&sa, &sb, DistanceMode::MinPolygon, &p);
        let want = sampled_gap(&corners(a, L, W), &corners(b, L, W));
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        let cg = agent_distance(&sa, &sb, DistanceMode::Cg, &p);
        assert!((cg - (a.x - b.x).hypot(a.y - b.y)).abs() < 1e-15);
    }
}

fn boundary_oracle(pose: Pose, pts: &[[f64; 2]]) -> bool {
    let q = corners(pose, L, W);
    let edge_hit = pts
        .windows(2)
        .any(|w| (0..4).any(|i| seg_hit(q[i], q[(i + 1) % 4], w[0], w[1])));
    // strict interior: every edge orientation has one strict sign
    let strictly_inside = |p: [f64; 2]| {
        let s: Vec<f64> = (0..4)
            .map(|i| {
                (q[(i + 1) % 4][0] - q[i][0]) * (p[1] - q[i][1])
                    - (q[(i + 1) % 4][1] - q[i][1]) * (p[0] - q[i][0])
            })
            .collect();
        s.iter().all(|&v| v > 0.0) || s.iter().all(|&v| v < 0.0)
    };
    edge_hit || pts.iter().any(|&p| strictly_inside(p))
}

#[test]
fn grazing_boundaries_match_segment_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut hits = 0;
    for _ in 0..2000 {
        let pose = random_pose(&mut rng, 0.05);
        // a wiggly polyline passing roughly half a width away from the centre
        let offset = rng.random_range(0.0..0.1);
        let base = rng.random_range(-3.2..3.2);
        let dir = Vec2::from_angle(base);
        let normal = dir.perp();
        let pts: Vec<[f64; 2]> = (0..6)
            .map(|k| {
                let t = -0.3 + 0.12 * k as f64;
                let wiggle = rng.random_range(-0.01..0.01);
                let p = pose.position() + dir * t + normal * (offset + wiggle);
                [p.x, p.y]
            })
            .collect();
        let pl = Polyline::new(pts.iter().map(|&p| Vec2::from(p)).collect()).unwrap();
        let want = boundary_oracle(pose, &pts);
        assert_eq!(
            rect_polyline_collision(&rectangle_vertices(pose, L, W), &pl),
            want
        );
        hits += usize::from(want);
    }
    assert!(hits > 200 && hits < 1800, "{hits}");
}

proptest! {
    #[test]
    fn pairwise_flags_are_symmetric_and_complete(poses in prop::collection::vec((-0.5f64..0.5, -0.5f64..0.5, -3.2f64..3.2), 1..8)) {
        let fps: Vec<_> = poses.iter().map(|&(x, y, h)| rectangle_vertices(Pose::new(x, y, h), L, W)).collect();
        let flags = agent_agent_flags(&fps, L.hypot(W));
        for i in 0..fps.len() {
            let any = (0..fps.len()).any(|j| j != i && obb_intersect(&fps[i], &fps[j]));
            prop_assert_eq!(flags[i], any);
        }
        prop_assert!(flags.iter().filter(|&&f| f).count() != 1);
    }

    #[test]
    fn intersection_is_symmetric(a in (-0.3f64..0.3, -0.3f64..0.3, -3.2f64..3.2), b in (-0.3f64..0.3, -0.3f64..0.3, -3.2f64..3.2)) {
        let fa = rectangle_vertices(Pose::new(a.0, a.1, a.2), L, W);
        let fb = rectangle_vertices(Pose::new(b.0, b.1, b.2), L, W);
        prop_assert_eq!(obb_intersect(&fa, &fb), obb_intersect(&fb, &fa));
    }
}

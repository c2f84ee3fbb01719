//! Independent reference implementations used by the integration and acceptance tests.
#![allow(dead_code)]

use std::path::PathBuf;

use lanegym::dynamics::{Action, AgentState, VehicleParams};
use lanegym::env::{Env, EnvConfig};
use lanegym::geom::{Pose, Rigid2, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("data")
}

pub fn maps_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("maps")
}

// ---- rectangles -----------------------------------------------------------

/// Corners of a `length x width` rectangle centred at `pose`, built from
/// half-extent offsets along the heading and its normal.
pub fn corners(pose: Pose, length: f64, width: f64) -> [[f64; 2]; 4] {
    let (c, s) = (pose.yaw.cos(), pose.yaw.sin());
    let (hl, hw) = (length / 2.0, width / 2.0);
    let at = |a: f64, b: f64| [pose.x + a * c - b * s, pose.y + a * s + b * c];
    [at(hl, hw), at(hl, -hw), at(-hl, -hw), at(-hl, hw)]
}

fn orientation(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn within(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

/// Closed segment intersection by orientation signs.
pub fn seg_hit(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let (o1, o2) = (orientation(p1, p2, q1), orientation(p1, p2, q2));
    let (o3, o4) = (orientation(q1, q2, p1), orientation(q1, q2, p2));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    (o1 == 0.0 && within(p1, p2, q1))
        || (o2 == 0.0 && within(p1, p2, q2))
        || (o3 == 0.0 && within(q1, q2, p1))
        || (o4 == 0.0 && within(q1, q2, p2))
}

/// Closed containment in a convex quadrilateral with either winding.
pub fn in_quad(q: &[[f64; 2]; 4], p: [f64; 2]) -> bool {
    let signs: Vec<f64> = (0..4)
        .map(|i| orientation(q[i], q[(i + 1) % 4], p))
        .collect();
    signs.iter().all(|&s| s >= 0.0) || signs.iter().all(|&s| s <= 0.0)
}

/// Overlap verdict from edge crossings plus a dense grid of interior samples.
pub fn brute_overlap(a: &[[f64; 2]; 4], b: &[[f64; 2]; 4]) -> bool {
    for i in 0..4 {
        for j in 0..4 {
            if seg_hit(a[i], a[(i + 1) % 4], b[j], b[(j + 1) % 4]) {
                return true;
            }
        }
    }
    let sample = |q: &[[f64; 2]; 4], other: &[[f64; 2]; 4]| {
        let n = 8;
        (0..=n).any(|u| {
            (0..=n).any(|v| {
                let (fu, fv) = (u as f64 / n as f64, v as f64 / n as f64);
                let p = [
                    q[0][0] + fu * (q[1][0] - q[0][0]) + fv * (q[3][0] - q[0][0]),
                    q[0][1] + fu * (q[1][1] - q[0][1]) + fv * (q[3][1] - q[0][1]),
                ];
                in_quad(other, p)
            })
        })
    };
    sample(a, b) || sample(b, a)
}

pub fn point_seg_dist(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

/// Gap between two rectangles from densely sampled edge points.
pub fn sampled_gap(a: &[[f64; 2]; 4], b: &[[f64; 2]; 4]) -> f64 {
    if brute_overlap(a, b) {
        return 0.0;
    }
    let one_way = |p: &[[f64; 2]; 4], q: &[[f64; 2]; 4]| {
        let mut best = f64::INFINITY;
        for i in 0..4 {
            let (s, e) = (p[i], p[(i + 1) % 4]);
            for k in 0..=200 {
                let t = k as f64 / 200.0;
                let pt = [s[0] + t * (e[0] - s[0]), s[1] + t * (e[1] - s[1])];
                for j in 0..4 {
                    best = best.min(point_seg_dist(pt, q[j], q[(j + 1) % 4]));
                }
            }
        }
        best
    };
    one_way(a, b).min(one_way(b, a))
}

// ---- kinematics -----------------------------------------------------------

/// Classical RK4 on the single-track ODE at constant inputs.
pub fn rk4_track(
    p: &VehicleParams,
    start: Pose,
    speed: f64,
    steering: f64,
    dt: f64,
    steps: usize,
) -> Vec<[f64; 3]> {
    let beta = (p.rear_to_cg / p.wheelbase * steering.tan()).atan();
    let f = |s: [f64; 3]| {
        [
            speed * (s[2] + beta).cos(),
            speed * (s[2] + beta).sin(),
            speed * beta.cos() * steering.tan() / p.wheelbase,
        ]
    };
    let mut s = [start.x, start.y, start.yaw];
    let mut out = vec![s];
    for _ in 0..steps {
        let k1 = f(s);
        let k2 = f([0, 1, 2].map(|i| s[i] + 0.5 * dt * k1[i]));
        let k3 = f([0, 1, 2].map(|i| s[i] + 0.5 * dt * k2[i]));
        let k4 = f([0, 1, 2].map(|i| s[i] + dt * k3[i]));
        s = [0, 1, 2].map(|i| s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        out.push(s);
    }
    out
}

/// Least-squares circle through points (algebraic fit), returning centre and radius.
pub fn fit_circle(points: &[[f64; 2]]) -> ([f64; 2], f64) {
    // minimise sum (x^2 + y^2 + D x + E y + F)^2 via the 3x3 normal equations
    let mut m = [[0.0f64; 3]; 3];
    let mut r = [0.0f64; 3];
    for p in points {
        let row = [p[0], p[1], 1.0];
        let z = -(p[0] * p[0] + p[1] * p[1]);
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            r[i] += row[i] * z;
        }
    }
    let sol = solve3(m, r);
    let c = [-sol[0] / 2.0, -sol[1] / 2.0];
    (c, (c[0] * c[0] + c[1] * c[1] - sol[2]).sqrt())
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (dst, src) in a[row].iter_mut().zip(pivot_row).skip(col) {
                *dst -= f * src;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

// ---- worlds ---------------------------------------------------------------

/// A lived-in world: reset with `seed`, then a few random joint actions.
pub fn random_world(scenario: &str, agents: usize, seed: u64, steps: usize) -> Env {
    let cfg = EnvConfig {
        scenario: scenario.into(),
        num_agents: agents,
        seed,
        ..Default::default()
    };
    let mut env = Env::new(cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5);
    for _ in 0..steps {
        let acts: Vec<Action> = (0..agents)
            .map(|_| Action::new(rng.random_range(0.0..0.8), rng.random_range(-0.3..0.3)))
            .collect();
        env.step(&acts).unwrap();
    }
    env
}

pub fn random_rigid(rng: &mut impl Rng) -> Rigid2 {
    Rigid2::new(
        rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
        Vec2::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0)),
    )
}

pub fn transform_agents(agents: &[AgentState], g: &Rigid2) -> Vec<AgentState> {
    agents
        .iter()
        .map(|a| AgentState {
            pose: g.apply_pose(a.pose),
            ..*a
        })
        .collect()
}

/// Minimum CG distance between agent `i` and every other agent.
pub fn nearest_gap(xy: &[[f64; 2]], i: usize) -> f64 {
    (0..xy.len())
        .filter(|&j| j != i)
        .map(|j| (xy[i][0] - xy[j][0]).hypot(xy[i][1] - xy[j][1]))
        .fold(f64::INFINITY, f64::min)
}

pub const REFERENCE_SCENARIOS: [&str; 4] = ["cpm", "intersection", "on_ramp", "roundabout"];

/// Reference composite scores keyed by (scenario, model).
pub fn reference_scores() -> Vec<(String, String, f64)> {
    let text = std::fs::read_to_string(data_dir().join("reference_scores.csv")).unwrap();
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].to_string(), f[2].parse().unwrap())
        })
        .collect()
}

//! Shipped desk-scale scenarios.
//!
//! The JSON files under `maps/` are exports of these builders; a test keeps
//! them in sync.

use std::f64::consts::{FRAC_PI_2, PI};

use super::builder::{LaneBuilder, MapBuilder};
use super::{MapError, ScenarioMap};
use crate::geom::{Rigid2, Vec2};

pub const LANE_WIDTH: f64 = 0.3;

pub const SCENARIO_NAMES: [&str; 3] = ["loop_intersection", "onramp_strip", "mini_roundabout"];

/// Looks up a shipped scenario by name.
pub fn by_name(name: &str) -> Option<ScenarioMap> {
    match name {
        "loop_intersection" => Some(loop_intersection()),
        "onramp_strip" => Some(onramp_strip()),
        "mini_roundabout" => Some(mini_roundabout()),
        _ => None,
    }
}

/// Resolves a scenario argument: a shipped name or a path to a JSON map file.
pub fn resolve(scenario: &str) -> Result<ScenarioMap, MapError> {
    match by_name(scenario) {
        Some(map) => Ok(map),
        None => super::load_scenario(scenario),
    }
}

/// Figure-eight loop of two squares meeting at a single 4-way crossing at the origin.
///
/// Eastbound traffic on `y = 0` crosses southbound traffic on `x = 0`. Two
/// turn lanelets inside the crossing let paths circle only one of the squares.
pub fn loop_intersection() -> ScenarioMap {
    let (a, r, c) = (2.5, 0.6, 0.5);
    let at = |x: f64, y: f64, h: f64| LaneBuilder::at(Vec2::new(x, y), h);
    let mut mb = MapBuilder::new("loop_intersection", LANE_WIDTH);
    // upper-right square, counter-clockwise
    mb.lane(1, at(c, 0.0, 0.0).straight(a - r - c));
    mb.lane(2, at(a - r, 0.0, 0.0).arc(r, FRAC_PI_2));
    mb.lane(3, at(a, r, FRAC_PI_2).straight(a - 2.0 * r));
    mb.lane(4, at(a, a - r, FRAC_PI_2).arc(r, FRAC_PI_2));
    mb.lane(5, at(a - r, a, PI).straight(a - 2.0 * r));
    mb.lane(6, at(r, a, PI).arc(r, FRAC_PI_2));
    mb.lane(7, at(0.0, a - r, -FRAC_PI_2).straight(a - r - c));
    mb.lane(8, at(0.0, c, -FRAC_PI_2).straight(2.0 * c));
    // lower-left square, clockwise
    mb.lane(9, at(0.0, -c, -FRAC_PI_2).straight(a - r - c));
    mb.lane(10, at(0.0, -(a - r), -FRAC_PI_2).arc(r, -FRAC_PI_2));
    mb.lane(11, at(-r, -a, PI).straight(a - 2.0 * r));
    mb.lane(12, at(-(a - r), -a, PI).arc(r, -FRAC_PI_2));
    mb.lane(13, at(-a, -(a - r), FRAC_PI_2).straight(a - 2.0 * r));
    mb.lane(14, at(-a, -r, FRAC_PI_2).arc(r, -FRAC_PI_2));
    mb.lane(15, at(-(a - r), 0.0, 0.0).straight(a - r - c));
    mb.lane(16, at(-c, 0.0, 0.0).straight(2.0 * c));
    // turns inside the crossing
    mb.lane(17, at(-c, 0.0, 0.0).arc(c, -FRAC_PI_2));
    mb.lane(18, at(0.0, c, -FRAC_PI_2).arc(c, FRAC_PI_2));

    let upper: Vec<i64> = (1..=7).collect();
    let lower: Vec<i64> = (9..=15).collect();
    let eight: Vec<i64> = (1..=16).collect();
    mb.path(0, eight.clone(), true);
    mb.path(1, [upper.clone(), vec![18]].concat(), true);
    mb.path(2, [lower, vec![17]].concat(), true);
    mb.path(3, [upper, vec![18], eight].concat(), true);
    mb.build().expect("loop_intersection is valid")
}

/// Stadium loop with a ramp that leaves the top straight, swings round the
/// west end and merges back into the bottom straight.
pub fn onramp_strip() -> ScenarioMap {
    let at = |x: f64, y: f64, h: f64| LaneBuilder::at(Vec2::new(x, y), h);
    let mut mb = MapBuilder::new("onramp_strip", LANE_WIDTH);
    mb.lane(1, at(-2.0, 0.0, 0.0).straight(2.0));
    mb.lane(2, at(0.0, 0.0, 0.0).straight(2.0));
    mb.lane(3, at(2.0, 0.0, 0.0).arc(1.0, PI));
    mb.lane(4, at(2.0, 2.0, PI).straight(3.0));
    mb.lane(5, at(-1.0, 2.0, PI).straight(1.0));
    mb.lane(6, at(-2.0, 2.0, PI).arc(1.0, PI));
    mb.lane(7, at(-1.0, 2.0, PI).arc(0.6, -FRAC_PI_2).arc(0.9, PI));
    mb.lane(
        8,
        at(-3.4, 2.6, -FRAC_PI_2).straight(2.8).arc(0.6, FRAC_PI_2),
    );
    mb.lane(
        9,
        at(-2.8, -0.8, 0.0)
            .straight(1.2)
            .bezier_to(Vec2::ZERO, 0.0, 0.6, 0.6),
    );
    mb.path(0, vec![1, 2, 3, 4, 5, 6], true);
    mb.path(1, vec![2, 3, 4, 7, 8, 9], true);
    mb.build().expect("onramp_strip is valid")
}

/// Single-lane roundabout of radius 1 m with four petal loops, each leaving
/// the ring at one quarter point and rejoining at the next.
pub fn mini_roundabout() -> ScenarioMap {
    let radius = 1.0;
    let mut mb = MapBuilder::new("mini_roundabout", LANE_WIDTH);
    for k in 0..4 {
        let g = Rigid2::new(k as f64 * FRAC_PI_2, Vec2::ZERO);
        let quarter = LaneBuilder::at(Vec2::new(radius, 0.0), FRAC_PI_2).arc(radius, FRAC_PI_2);
        mb.lane(1 + k, quarter.transformed(&g));
        let petal = LaneBuilder::at(Vec2::new(radius, 0.0), FRAC_PI_2)
            .arc(0.6, -FRAC_PI_2)
            .straight(0.6)
            .arc(0.6, PI)
            .straight(1.2)
            .bezier_to(Vec2::new(0.0, radius), PI, 0.4, 0.4);
        mb.lane(11 + k, petal.transformed(&g));
    }
    mb.path(0, vec![1, 2, 3, 4], true);
    for k in 0..4i64 {
        let ring = |j: i64| 1 + (k + j) % 4;
        mb.path(1 + k, vec![11 + k, ring(1), ring(2), ring(3)], true);
    }
    mb.build().expect("mini_roundabout is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_maps_build() {
        for name in SCENARIO_NAMES {
            let map = by_name(name).unwrap();
            assert_eq!(map.name, name);
            for p in &map.reference_paths {
                assert!(p.is_loop);
                assert!(p.length() > 5.0, "{name} path {} too short", p.id);
            }
        }
        let li = loop_intersection();
        assert!(li.lanelets.len() >= 8);
        assert!(li.reference_paths.len() >= 4);
    }
}

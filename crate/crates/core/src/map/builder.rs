//! Small turtle-style authoring helpers for constant-width lanelet maps.

use super::{Bounds, Lanelet, MapError, Polyline, ScenarioMap};
use crate::geom::{Rigid2, Vec2};

/// Target spacing between sampled vertices on curved pieces.
const CURVE_STEP: f64 = 0.05;

/// Traces a lane center line piece by piece, keeping the tangent at every vertex.
#[derive(Debug, Clone)]
pub struct LaneBuilder {
    points: Vec<Vec2>,
    tangents: Vec<Vec2>,
    heading: f64,
}

impl LaneBuilder {
    pub fn at(start: Vec2, heading: f64) -> Self {
        Self {
            points: vec![start],
            tangents: vec![Vec2::from_angle(heading)],
            heading,
        }
    }

    pub fn end(&self) -> (Vec2, f64) {
        (*self.points.last().unwrap(), self.heading)
    }

    fn push(&mut self, p: Vec2, tangent: Vec2) {
        self.points.push(p);
        self.tangents.push(tangent);
    }

    pub fn straight(mut self, length: f64) -> Self {
        let (p, h) = self.end();
        self.push(p + Vec2::from_angle(h) * length, Vec2::from_angle(h));
        self
    }

    /// Circular arc; positive `angle` turns left.
    pub fn arc(mut self, radius: f64, angle: f64) -> Self {
        let (p, h) = self.end();
        let side = angle.signum();
        let center = p + Vec2::from_angle(h).perp() * (radius * side);
        let start = p - center;
        let n = ((radius * angle.abs()) / CURVE_STEP).ceil().max(2.0) as usize;
        for k in 1..=n {
            let a = angle * k as f64 / n as f64;
            self.push(center + start.rotate(a), Vec2::from_angle(h + a));
        }
        self.heading = h + angle;
        self
    }

    /// Cubic Bezier to `end` arriving with `end_heading`; handle lengths set the control points.
    pub fn bezier_to(
        mut self,
        end: Vec2,
        end_heading: f64,
        handle_out: f64,
        handle_in: f64,
    ) -> Self {
        let (p0, h) = self.end();
        let p1 = p0 + Vec2::from_angle(h) * handle_out;
        let p2 = end - Vec2::from_angle(end_heading) * handle_in;
        let p3 = end;
        let approx = p0.distance(p1) + p1.distance(p2) + p2.distance(p3);
        let n = (approx / CURVE_STEP).ceil().max(4.0) as usize;
        for k in 1..=n {
            let t = k as f64 / n as f64;
            let u = 1.0 - t;
            let pt = p0 * (u * u * u)
                + p1 * (3.0 * u * u * t)
                + p2 * (3.0 * u * t * t)
                + p3 * (t * t * t);
            let d =
                (p1 - p0) * (3.0 * u * u) + (p2 - p1) * (6.0 * u * t) + (p3 - p2) * (3.0 * t * t);
            let pt = if k == n { end } else { pt };
            self.push(pt, d.normalized());
        }
        self.heading = end_heading;
        self
    }

    pub fn transformed(mut self, g: &Rigid2) -> Self {
        for p in &mut self.points {
            *p = g.apply_point(*p);
        }
        for t in &mut self.tangents {
            *t = g.apply_vector(*t);
        }
        self.heading += g.angle;
        self
    }
}

/// Collects lanelets and paths; successors are derived from path adjacency.
#[derive(Debug)]
pub struct MapBuilder {
    name: String,
    lane_width: f64,
    lanes: Vec<(i64, LaneBuilder)>,
    paths: Vec<(i64, Vec<i64>, bool)>,
    margin: f64,
}

impl MapBuilder {
    pub fn new(name: impl Into<String>, lane_width: f64) -> Self {
        Self {
            name: name.into(),
            lane_width,
            lanes: Vec::new(),
            paths: Vec::new(),
            margin: 0.25,
        }
    }

    pub fn lane(&mut self, id: i64, lane: LaneBuilder) -> i64 {
        self.lanes.push((id, lane));
        id
    }

    pub fn path(&mut self, id: i64, lanelets: Vec<i64>, is_loop: bool) {
        self.paths.push((id, lanelets, is_loop));
    }

    fn make_lanelet(&self, id: i64, lane: &LaneBuilder) -> Result<Lanelet, MapError> {
        let half = 0.5 * self.lane_width;
        let offset = |sign: f64| -> Vec<Vec2> {
            lane.points
                .iter()
                .zip(&lane.tangents)
                .map(|(&p, &t)| p + t.perp() * (sign * half))
                .collect()
        };
        let poly = |pts: Vec<Vec2>, what: &str| {
            Polyline::new(pts).map_err(|e| MapError::Lanelet {
                lanelet: id,
                message: format!("{what}: {e}"),
            })
        };
        let mut successors = Vec::new();
        for (_, seq, is_loop) in &self.paths {
            let n = seq.len();
            for (k, &l) in seq.iter().enumerate() {
                if l != id {
                    continue;
                }
                let next = if k + 1 < n {
                    Some(seq[k + 1])
                } else if *is_loop {
                    Some(seq[0])
                } else {
                    None
                };
                if let Some(next) = next {
                    if !successors.contains(&next) {
                        successors.push(next);
                    }
                }
            }
        }
        successors.sort_unstable();
        Ok(Lanelet {
            id,
            center_line: poly(lane.points.clone(), "center")?,
            left_boundary: poly(offset(1.0), "left")?,
            right_boundary: poly(offset(-1.0), "right")?,
            successors,
        })
    }

    pub fn build(self) -> Result<ScenarioMap, MapError> {
        let lanelets = self
            .lanes
            .iter()
            .map(|(id, lane)| self.make_lanelet(*id, lane))
            .collect::<Result<Vec<_>, _>>()?;
        let all = lanelets.iter().flat_map(|l| {
            l.left_boundary
                .points()
                .iter()
                .chain(l.right_boundary.points())
                .chain(l.center_line.points())
                .copied()
        });
        let raw = Bounds::around(all).unwrap_or(Bounds {
            min: Vec2::ZERO,
            max: Vec2::new(1.0, 1.0),
        });
        let round_out = |v: f64, up: bool| {
            let k = v * 10.0;
            (if up { k.ceil() } else { k.floor() }) / 10.0
        };
        let b = raw.expanded(self.margin);
        let bounds = Bounds {
            min: Vec2::new(round_out(b.min.x, false), round_out(b.min.y, false)),
            max: Vec2::new(round_out(b.max.x, true), round_out(b.max.y, true)),
        };
        ScenarioMap::assemble(self.name, bounds, lanelets, self.paths)
    }
}

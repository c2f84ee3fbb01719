//! Lanelet map model, polyline queries and scenario loading.
//!
//! A [`ScenarioMap`] is immutable once validated. Agents follow a
//! [`ReferencePath`], a stitched chain of lanelet center lines, and their lane
//! membership is read off the segment index of their projection onto that path.

pub mod builder;
pub mod builtin;
mod polyline;
mod schema;

use std::collections::HashMap;
use std::path::Path;

pub use polyline::{Polyline, PolylineError, Projection, MIN_POINT_GAP};
pub use schema::{LaneletFile, MapFile, PathFile};

use crate::geom::{Rigid2, Vec2};

/// Largest allowed gap between the end of one lanelet and the start of the next on a path.
pub const CONNECT_TOLERANCE: f64 = 1e-6;
/// Minimum boundary-to-boundary lane width (the default agent width).
pub const MIN_LANE_WIDTH: f64 = 0.08;

#[derive(Debug, thiserror::Error)]
pub enum MapError {
    #[error("cannot read map file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("map schema violation at {field}: {message}")]
    Schema { field: String, message: String },
    #[error("lanelet {lanelet}: {message}")]
    Lanelet { lanelet: i64, message: String },
    #[error("reference path {path}: {message}")]
    Path { path: i64, message: String },
    #[error("map {name}: {message}")]
    Map { name: String, message: String },
}

/// Axis-aligned rectangle in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: Vec2,
    pub max: Vec2,
}

impl Bounds {
    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn expanded(&self, margin: f64) -> Bounds {
        Bounds {
            min: Vec2::new(self.min.x - margin, self.min.y - margin),
            max: Vec2::new(self.max.x + margin, self.max.y + margin),
        }
    }

    /// Smallest axis-aligned box containing the given points.
    pub fn around(points: impl IntoIterator<Item = Vec2>) -> Option<Bounds> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut b = Bounds {
            min: first,
            max: first,
        };
        for p in it {
            b.min.x = b.min.x.min(p.x);
            b.min.y = b.min.y.min(p.y);
            b.max.x = b.max.x.max(p.x);
            b.max.y = b.max.y.max(p.y);
        }
        Some(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lanelet {
    pub id: i64,
    pub center_line: Polyline,
    pub left_boundary: Polyline,
    pub right_boundary: Polyline,
    pub successors: Vec<i64>,
}

impl Lanelet {
    fn validate(&self) -> Result<(), MapError> {
        let err = |message: String| MapError::Lanelet {
            lanelet: self.id,
            message,
        };
        let mid = |pl: &Polyline| pl.point_at(0.5 * pl.length());
        let left = self.center_line.project(mid(&self.left_boundary)).lateral;
        let right = self.center_line.project(mid(&self.right_boundary)).lateral;
        if !(left > 0.0 && right < 0.0) {
            return Err(err(format!(
                "left/right boundaries must lie left/right of the center line \
                 (midpoint offsets {left:.4} and {right:.4})"
            )));
        }
        let narrowest = self
            .left_boundary
            .points()
            .iter()
            .map(|&p| self.right_boundary.distance_to(p))
            .chain(
                self.right_boundary
                    .points()
                    .iter()
                    .map(|&p| self.left_boundary.distance_to(p)),
            )
            .fold(f64::INFINITY, f64::min);
        if narrowest <= MIN_LANE_WIDTH {
            return Err(err(format!(
                "lane width {narrowest:.4} m is not above {MIN_LANE_WIDTH} m"
            )));
        }
        Ok(())
    }

    fn transformed(&self, g: &Rigid2) -> Lanelet {
        Lanelet {
            id: self.id,
            center_line: self.center_line.transformed(g),
            left_boundary: self.left_boundary.transformed(g),
            right_boundary: self.right_boundary.transformed(g),
            successors: self.successors.clone(),
        }
    }
}

/// Projection of a point onto a reference path, including the lanelet it falls in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathProjection {
    pub s: f64,
    pub lateral: f64,
    pub segment: usize,
    /// Index into [`ScenarioMap::lanelets`].
    pub lanelet: usize,
}

/// A long-term route: a chain of connected lanelets with a stitched center line.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePath {
    pub id: i64,
    pub lanelet_sequence: Vec<i64>,
    pub center_line: Polyline,
    pub is_loop: bool,
    /// Lanelet index (into the map's lanelet list) owning each stitched segment.
    segment_lanelet: Vec<usize>,
}

impl ReferencePath {
    fn stitch(
        id: i64,
        lanelet_sequence: Vec<i64>,
        is_loop: bool,
        lanelets: &[Lanelet],
        index: &HashMap<i64, usize>,
    ) -> Result<Self, MapError> {
        let err = |message: String| MapError::Path { path: id, message };
        if lanelet_sequence.is_empty() {
            return Err(err("lanelet sequence is empty".into()));
        }
        let mut idx = Vec::with_capacity(lanelet_sequence.len());
        for lid in &lanelet_sequence {
            match index.get(lid) {
                Some(&i) => idx.push(i),
                None => return Err(err(format!("references missing lanelet {lid}"))),
            }
        }
        let mut links: Vec<(usize, usize)> = idx.windows(2).map(|w| (w[0], w[1])).collect();
        if is_loop {
            links.push((*idx.last().unwrap(), idx[0]));
        }
        for (a, b) in links {
            let gap = lanelets[a]
                .center_line
                .last()
                .distance(lanelets[b].center_line.first());
            if gap > CONNECT_TOLERANCE {
                return Err(err(format!(
                    "lanelets {} and {} are not connected (gap {gap:.3e} m)",
                    lanelets[a].id, lanelets[b].id
                )));
            }
        }

        let mut points: Vec<Vec2> = Vec::new();
        let mut segment_lanelet = Vec::new();
        for (k, &li) in idx.iter().enumerate() {
            let pts = lanelets[li].center_line.points();
            let skip = usize::from(k > 0);
            points.extend_from_slice(&pts[skip..]);
            segment_lanelet.extend(std::iter::repeat_n(li, pts.len() - 1));
        }
        let center_line =
            Polyline::new(points).map_err(|e| err(format!("stitched center line: {e}")))?;
        debug_assert_eq!(center_line.segment_count(), segment_lanelet.len());
        Ok(Self {
            id,
            lanelet_sequence,
            center_line,
            is_loop,
            segment_lanelet,
        })
    }

    pub fn length(&self) -> f64 {
        self.center_line.length()
    }

    /// Lanelet index owning stitched segment `segment`.
    pub fn lanelet_of_segment(&self, segment: usize) -> usize {
        self.segment_lanelet[segment]
    }

    /// Wraps (loop) or clamps (open path) an arc length onto the path.
    pub fn normalize_s(&self, s: f64) -> f64 {
        let len = self.length();
        if self.is_loop {
            s.rem_euclid(len)
        } else {
            s.clamp(0.0, len)
        }
    }

    /// Signed arc-length difference `to - from`, taking the short way round on loops.
    pub fn arc_delta(&self, from: f64, to: f64) -> f64 {
        let d = to - from;
        if self.is_loop {
            let len = self.length();
            let w = d.rem_euclid(len);
            if w > 0.5 * len {
                w - len
            } else {
                w
            }
        } else {
            d
        }
    }

    fn with_lanelet(&self, proj: Projection) -> PathProjection {
        PathProjection {
            s: proj.s,
            lateral: proj.lateral,
            segment: proj.segment,
            lanelet: self.segment_lanelet[proj.segment],
        }
    }

    /// Projects onto the globally nearest segment of the stitched center line.
    pub fn project(&self, p: Vec2) -> PathProjection {
        self.with_lanelet(self.center_line.project(p))
    }

    /// Projects onto the nearest segment whose arc-length range lies within
    /// `window` of `s_hint`. Used for progress tracking so that self-crossing
    /// paths do not make an agent jump between branches.
    pub fn project_near(&self, p: Vec2, s_hint: f64, window: f64) -> PathProjection {
        let cum = self.center_line.cumulative_arclength();
        let len = self.length();
        let shifts: &[f64] = if self.is_loop {
            &[-len, 0.0, len]
        } else {
            &[0.0]
        };
        let near = |i: usize| {
            let (lo, hi) = (cum[i], cum[i + 1]);
            shifts.iter().any(|&k| {
                let s = s_hint + k;
                (lo - s).max(s - hi) <= window
            })
        };
        let segments = (0..self.center_line.segment_count()).filter(|&i| near(i));
        match self.center_line.project_segments(p, segments) {
            Some(proj) => self.with_lanelet(proj),
            None => self.project(p),
        }
    }

    /// `n_ref` points at arc lengths `s + k * spacing`, `k = 1..=n_ref`.
    pub fn sample_ahead(&self, s: f64, n_ref: usize, spacing: f64) -> Vec<Vec2> {
        (1..=n_ref)
            .map(|k| {
                self.center_line
                    .point_at(self.normalize_s(s + k as f64 * spacing))
            })
            .collect()
    }

    /// Stitched-segment index containing arc length `s`.
    pub fn segment_at(&self, s: f64) -> usize {
        self.center_line.segment_at(self.normalize_s(s))
    }

    fn transformed(&self, g: &Rigid2) -> ReferencePath {
        ReferencePath {
            center_line: self.center_line.transformed(g),
            ..self.clone()
        }
    }
}

/// A validated, immutable driving scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioMap {
    pub name: String,
    pub bounds: Bounds,
    pub lanelets: Vec<Lanelet>,
    pub reference_paths: Vec<ReferencePath>,
    index: HashMap<i64, usize>,
}

impl ScenarioMap {
    /// Validates a parsed map file and builds the derived path geometry.
    pub fn from_file(file: MapFile) -> Result<Self, MapError> {
        file.into_map()
    }

    pub(crate) fn assemble(
        name: String,
        bounds: Bounds,
        lanelets: Vec<Lanelet>,
        paths: Vec<(i64, Vec<i64>, bool)>,
    ) -> Result<Self, MapError> {
        let mut index = HashMap::with_capacity(lanelets.len());
        for (i, l) in lanelets.iter().enumerate() {
            if index.insert(l.id, i).is_some() {
                return Err(MapError::Lanelet {
                    lanelet: l.id,
                    message: "duplicate lanelet id".into(),
                });
            }
        }
        for l in &lanelets {
            l.validate()?;
            if let Some(s) = l.successors.iter().find(|s| !index.contains_key(s)) {
                return Err(MapError::Lanelet {
                    lanelet: l.id,
                    message: format!("successor {s} does not exist"),
                });
            }
            for (what, pl) in [
                ("center", &l.center_line),
                ("left", &l.left_boundary),
                ("right", &l.right_boundary),
            ] {
                if let Some(p) = pl.points().iter().find(|p| !bounds.contains(**p)) {
                    return Err(MapError::Lanelet {
                        lanelet: l.id,
                        message: format!(
                            "{what} point ({}, {}) lies outside the map bounds",
                            p.x, p.y
                        ),
                    });
                }
            }
        }
        if paths.is_empty() {
            return Err(MapError::Map {
                name,
                message: "map defines no reference paths".into(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        let mut reference_paths = Vec::with_capacity(paths.len());
        for (id, seq, is_loop) in paths {
            if !seen.insert(id) {
                return Err(MapError::Path {
                    path: id,
                    message: "duplicate path id".into(),
                });
            }
            reference_paths.push(ReferencePath::stitch(id, seq, is_loop, &lanelets, &index)?);
        }
        Ok(Self {
            name,
            bounds,
            lanelets,
            reference_paths,
            index,
        })
    }

    pub fn lanelet_by_id(&self, id: i64) -> Option<&Lanelet> {
        self.index.get(&id).map(|&i| &self.lanelets[i])
    }

    pub fn to_file(&self) -> MapFile {
        MapFile::from_map(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("map serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, MapError> {
        let file: MapFile = serde_json::from_str(text).map_err(schema::json_error)?;
        file.into_map()
    }

    /// Applies a rigid motion to every polyline and the bounds.
    pub fn transformed(&self, g: &Rigid2) -> ScenarioMap {
        let lanelets: Vec<Lanelet> = self.lanelets.iter().map(|l| l.transformed(g)).collect();
        let corners = [
            self.bounds.min,
            Vec2::new(self.bounds.max.x, self.bounds.min.y),
            self.bounds.max,
            Vec2::new(self.bounds.min.x, self.bounds.max.y),
        ];
        ScenarioMap {
            name: self.name.clone(),
            bounds: Bounds::around(corners.iter().map(|&c| g.apply_point(c))).unwrap(),
            lanelets,
            reference_paths: self
                .reference_paths
                .iter()
                .map(|p| p.transformed(g))
                .collect(),
            index: self.index.clone(),
        }
    }
}

/// Reads and validates a JSON map file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioMap, MapError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| MapError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ScenarioMap::from_json(&text)
}

/// Projects `point` onto the path's center line, returning `(s, d_CL, segment_index)`.
pub fn project_to_path(point: Vec2, path: &ReferencePath) -> (f64, f64, usize) {
    let p = path.project(point);
    (p.s, p.lateral, p.segment)
}

/// Short-term reference points ahead of arc length `s`.
pub fn sample_short_term_ref(
    path: &ReferencePath,
    s: f64,
    n_ref: usize,
    spacing: f64,
) -> Vec<Vec2> {
    path.sample_ahead(s, n_ref, spacing)
}

/// Unsigned distances from `position` to the left and right boundaries of `lanelet`.
pub fn boundary_distances(position: Vec2, lanelet: &Lanelet) -> (f64, f64) {
    (
        lanelet.left_boundary.distance_to(position),
        lanelet.right_boundary.distance_to(position),
    )
}

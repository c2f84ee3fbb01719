//! JSON map schema.
//!
//! ```json
//! {"name": "...", "bounds": [xmin, ymin, xmax, ymax],
//!  "lanelets": [{"id": 1, "center": [[x, y], ...], "left": [...], "right": [...], "successors": [2]}],
//!  "paths": [{"id": 0, "lanelets": [1, 2], "loop": true}]}
//! ```

use serde::{Deserialize, Serialize};

use super::{Bounds, Lanelet, MapError, Polyline, ScenarioMap};
use crate::geom::Vec2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub name: String,
    pub bounds: [f64; 4],
    pub lanelets: Vec<LaneletFile>,
    pub paths: Vec<PathFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaneletFile {
    pub id: i64,
    pub center: Vec<[f64; 2]>,
    pub left: Vec<[f64; 2]>,
    pub right: Vec<[f64; 2]>,
    #[serde(default)]
    pub successors: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathFile {
    pub id: i64,
    pub lanelets: Vec<i64>,
    #[serde(rename = "loop")]
    pub is_loop: bool,
}

pub(crate) fn json_error(e: serde_json::Error) -> MapError {
    MapError::Schema {
        field: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    }
}

fn polyline(field: String, pts: &[[f64; 2]]) -> Result<Polyline, MapError> {
    Polyline::new(pts.iter().map(|&p| Vec2::from(p)).collect()).map_err(|e| MapError::Schema {
        field,
        message: e.to_string(),
    })
}

fn points(pl: &Polyline) -> Vec<[f64; 2]> {
    pl.points().iter().map(|&p| p.into()).collect()
}

impl MapFile {
    pub fn into_map(self) -> Result<ScenarioMap, MapError> {
        let [xmin, ymin, xmax, ymax] = self.bounds;
        if !(xmin < xmax && ymin < ymax) || self.bounds.iter().any(|v| !v.is_finite()) {
            return Err(MapError::Schema {
                field: "bounds".into(),
                message: format!(
                    "expected finite [xmin, ymin, xmax, ymax] with min < max, got {:?}",
                    self.bounds
                ),
            });
        }
        let bounds = Bounds {
            min: Vec2::new(xmin, ymin),
            max: Vec2::new(xmax, ymax),
        };
        let mut lanelets = Vec::with_capacity(self.lanelets.len());
        for (i, l) in self.lanelets.iter().enumerate() {
            let field = |f: &str| format!("lanelets[{i}] (id {}).{f}", l.id);
            lanelets.push(Lanelet {
                id: l.id,
                center_line: polyline(field("center"), &l.center)?,
                left_boundary: polyline(field("left"), &l.left)?,
                right_boundary: polyline(field("right"), &l.right)?,
                successors: l.successors.clone(),
            });
        }
        let paths = self
            .paths
            .into_iter()
            .map(|p| (p.id, p.lanelets, p.is_loop))
            .collect();
        ScenarioMap::assemble(self.name, bounds, lanelets, paths)
    }

    pub fn from_map(map: &ScenarioMap) -> MapFile {
        MapFile {
            name: map.name.clone(),
            bounds: [
                map.bounds.min.x,
                map.bounds.min.y,
                map.bounds.max.x,
                map.bounds.max.y,
            ],
            lanelets: map
                .lanelets
                .iter()
                .map(|l| LaneletFile {
                    id: l.id,
                    center: points(&l.center_line),
                    left: points(&l.left_boundary),
                    right: points(&l.right_boundary),
                    successors: l.successors.clone(),
                })
                .collect(),
            paths: map
                .reference_paths
                .iter()
                .map(|p| PathFile {
                    id: p.id,
                    lanelets: p.lanelet_sequence.clone(),
                    is_loop: p.is_loop,
                })
                .collect(),
        }
    }
}

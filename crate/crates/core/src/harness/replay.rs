use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{io_err, write_atomic, HarnessError};
use crate::collision::rectangle_vertices;
use crate::dynamics::VehicleParams;
use crate::env::{read_log, StepRecord};
use crate::geom::{Pose, Vec2};
use crate::map::{builtin, Polyline, ScenarioMap};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22",
];
const RESET_COLOR: &str = "#d62728";

#[derive(Debug, Clone, PartialEq)]
pub struct ReplaySummary {
    pub frames: usize,
    pub out_dir: PathBuf,
}

fn polyline_svg(out: &mut String, pl: &Polyline, style: &str) {
    out.push_str("<polyline points=\"");
    for p in pl.points() {
        write!(out, "{:.4},{:.4} ", p.x, p.y).unwrap();
    }
    writeln!(out, "\" {style}/>").unwrap();
}

fn background(map: &ScenarioMap) -> String {
    let mut s = String::new();
    for p in &map.reference_paths {
        polyline_svg(
            &mut s,
            &p.center_line,
            "fill=\"none\" stroke=\"#dddddd\" stroke-width=\"0.01\" stroke-dasharray=\"0.04 0.03\"",
        );
    }
    for l in &map.lanelets {
        for b in [&l.left_boundary, &l.right_boundary] {
            polyline_svg(
                &mut s,
                b,
                "fill=\"none\" stroke=\"#555555\" stroke-width=\"0.008\"",
            );
        }
    }
    s
}

fn frame_svg(map: &ScenarioMap, bg: &str, rec: &StepRecord, vehicle: &VehicleParams) -> String {
    let b = &map.bounds;
    let mut s = String::new();
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"800\" height=\"{}\">",
        b.min.x,
        -b.max.y,
        b.width(),
        b.height(),
        (800.0 * b.height() / b.width()).round()
    )
    .unwrap();
    writeln!(s, "<title>{} t={}</title>", map.name, rec.t).unwrap();
    s.push_str("<g transform=\"scale(1,-1)\">\n");
    s.push_str(bg);
    for a in &rec.agents {
        let reset = rec.resets.contains(&a.id);
        let fp = rectangle_vertices(Pose::new(a.x, a.y, a.yaw), vehicle.length, vehicle.width);
        let (fill, stroke, width) = if reset {
            (RESET_COLOR, RESET_COLOR, 0.02)
        } else {
            (PALETTE[a.id % PALETTE.len()], "#000000", 0.005)
        };
        write!(
            s,
            "<g class=\"agent{}\" data-id=\"{}\" data-x=\"{}\" data-y=\"{}\" data-yaw=\"{}\">",
            if reset { " reset" } else { "" },
            a.id,
            a.x,
            a.y,
            a.yaw
        )
        .unwrap();
        s.push_str("<polygon points=\"");
        for v in fp.vertices {
            write!(s, "{:.5},{:.5} ", v.x, v.y).unwrap();
        }
        writeln!(s, "\" fill=\"{fill}\" fill-opacity=\"0.8\" stroke=\"{stroke}\" stroke-width=\"{width}\"/></g>").unwrap();
    }
    s.push_str("</g>\n</svg>\n");
    s
}

/// One SVG document for a log record.
pub fn render_frame(map: &ScenarioMap, rec: &StepRecord, vehicle: &VehicleParams) -> String {
    frame_svg(map, &background(map), rec, vehicle)
}

/// Every logged agent must lie on the map and close to one of its lanelets.
fn check_matches(
    map: &ScenarioMap,
    records: &[StepRecord],
    vehicle: &VehicleParams,
) -> Result<(), HarnessError> {
    let mismatch = |message: String| HarnessError::Mismatch {
        scenario: map.name.clone(),
        message,
    };
    let half_width = map
        .lanelets
        .iter()
        .flat_map(|l| {
            l.left_boundary
                .points()
                .iter()
                .chain(l.right_boundary.points())
                .map(|&p| l.center_line.distance_to(p))
        })
        .fold(0.0, f64::max);
    let reach = half_width + vehicle.diagonal();
    for r in records {
        for a in &r.agents {
            let p = Vec2::new(a.x, a.y);
            let off_lane = || {
                map.lanelets
                    .iter()
                    .all(|l| l.center_line.distance_to(p) > reach)
            };
            if !map.bounds.contains(p) || off_lane() {
                return Err(mismatch(format!(
                    "agent {} at ({:.3}, {:.3}) in step {} is not on any lane",
                    a.id, a.x, a.y, r.t
                )));
            }
        }
        if let Some(&id) = r.resets.iter().find(|&&id| id >= r.agents.len()) {
            return Err(mismatch(format!("step {} resets unknown agent {id}", r.t)));
        }
    }
    Ok(())
}

/// Renders every record of `log` as `frame_<t>.svg` in `out`.
pub fn replay_command(
    log: &Path,
    scenario: &str,
    out: &Path,
    vehicle: &VehicleParams,
) -> Result<ReplaySummary, HarnessError> {
    let map = builtin::resolve(scenario)?;
    let records = read_log(log)?;
    check_matches(&map, &records, vehicle)?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let bg = background(&map);
    for r in &records {
        let svg = frame_svg(&map, &bg, r, vehicle);
        write_atomic(&out.join(format!("frame_{:05}.svg", r.t)), svg.as_bytes())?;
    }
    Ok(ReplaySummary {
        frames: records.len(),
        out_dir: out.to_path_buf(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{AgentRecord, FlagRecord};

    fn rec(t: u64, x: f64, resets: Vec<usize>) -> StepRecord {
        StepRecord {
            t,
            agents: vec![AgentRecord {
                id: 0,
                x,
                y: 0.1 + 0.2,
                yaw: 0.5,
                v: 0.3,
                action: [0.3, 0.0],
                flags: FlagRecord {
                    aa: false,
                    al: false,
                },
                d_cl: 0.0,
            }],
            resets,
        }
    }

    #[test]
    fn frame_carries_exact_pose_and_reset_highlight() {
        let map = builtin::mini_roundabout();
        let svg = render_frame(&map, &rec(1, 0.7, vec![0]), &VehicleParams::default());
        assert!(svg.contains("data-y=\"0.30000000000000004\""));
        assert!(svg.contains("class=\"agent reset\""));
        assert!(svg.contains(RESET_COLOR));
        let calm = render_frame(&map, &rec(2, 0.7, vec![]), &VehicleParams::default());
        assert!(!calm.contains("reset"));
    }

    #[test]
    fn off_map_log_is_a_mismatch() {
        let map = builtin::mini_roundabout();
        let v = VehicleParams::default();
        assert!(check_matches(&map, &[rec(1, 0.95, vec![])], &v).is_ok());
        let err = check_matches(&map, &[rec(1, 40.0, vec![])], &v).unwrap_err();
        assert!(err.is_validation());
        // inside the bounds but far from every lane
        let mut on_ring = rec(1, std::f64::consts::FRAC_1_SQRT_2, vec![]);
        on_ring.agents[0].y = std::f64::consts::FRAC_1_SQRT_2;
        assert!(check_matches(&map, &[on_ring.clone()], &v).is_ok());
        assert!(check_matches(&builtin::loop_intersection(), &[on_ring], &v).is_err());
    }
}

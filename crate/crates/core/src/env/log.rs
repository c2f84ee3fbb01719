//! JSONL trajectory logs, one record per step.
//!
//! ```text
//! {"t":1,"agents":[{"id":0,"x":..,"y":..,"yaw":..,"v":..,"action":[v,delta],
//!   "flags":{"aa":false,"al":false},"d_cl":..}],"resets":[]}
//! ```
//!
//! Floats are written with 17 significant digits so a log re-reads bit-exact.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::StepOutput;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlagRecord {
    pub aa: bool,
    pub al: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentRecord {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    pub v: f64,
    pub action: [f64; 2],
    pub flags: FlagRecord,
    pub d_cl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepRecord {
    pub t: u64,
    pub agents: Vec<AgentRecord>,
    pub resets: Vec<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path} line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
}

fn num(out: &mut String, x: f64) {
    write!(out, "{x:.16e}").expect("write to string");
}

impl StepRecord {
    pub fn from_output(out: &StepOutput) -> Self {
        let agents = out
            .states
            .iter()
            .zip(&out.actions)
            .zip(&out.flags)
            .enumerate()
            .map(|(id, ((s, a), f))| AgentRecord {
                id,
                x: s.pose.x,
                y: s.pose.y,
                yaw: s.pose.yaw,
                v: s.speed,
                action: [a.speed, a.steering],
                flags: FlagRecord {
                    aa: f.agent_agent,
                    al: f.agent_lane,
                },
                d_cl: s.track.lateral,
            })
            .collect();
        Self {
            t: out.t,
            agents,
            resets: out.reset_ids(),
        }
    }

    /// One JSON line without the trailing newline.
    pub fn to_line(&self) -> String {
        let mut s = String::with_capacity(64 + 200 * self.agents.len());
        write!(s, "{{\"t\":{},\"agents\":[", self.t).unwrap();
        for (k, a) in self.agents.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            write!(s, "{{\"id\":{},\"x\":", a.id).unwrap();
            num(&mut s, a.x);
            s.push_str(",\"y\":");
            num(&mut s, a.y);
            s.push_str(",\"yaw\":");
            num(&mut s, a.yaw);
            s.push_str(",\"v\":");
            num(&mut s, a.v);
            s.push_str(",\"action\":[");
            num(&mut s, a.action[0]);
            s.push(',');
            num(&mut s, a.action[1]);
            write!(
                s,
                "],\"flags\":{{\"aa\":{},\"al\":{}}},\"d_cl\":",
                a.flags.aa, a.flags.al
            )
            .unwrap();
            num(&mut s, a.d_cl);
            s.push('}');
        }
        s.push_str("],\"resets\":[");
        for (k, id) in self.resets.iter().enumerate() {
            if k > 0 {
                s.push(',');
            }
            write!(s, "{id}").unwrap();
        }
        s.push_str("]}");
        s
    }

    pub fn parse(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }
}

/// Streams step records to any writer.
pub struct TrajectoryWriter<W: Write> {
    out: W,
}

impl<W: Write> TrajectoryWriter<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }

    pub fn write_step(&mut self, step: &StepOutput) -> io::Result<()> {
        self.write_record(&StepRecord::from_output(step))
    }

    pub fn write_record(&mut self, rec: &StepRecord) -> io::Result<()> {
        self.out.write_all(rec.to_line().as_bytes())?;
        self.out.write_all(b"\n")
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

/// Reads every record of a JSONL log.
pub fn read_log(path: impl AsRef<Path>) -> Result<Vec<StepRecord>, LogError> {
    let path = path.as_ref();
    let name = path.display().to_string();
    let file = std::fs::File::open(path).map_err(|source| LogError::Io {
        path: name.clone(),
        source,
    })?;
    let mut records = Vec::new();
    for (i, line) in io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| LogError::Io {
            path: name.clone(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = StepRecord::parse(&line).map_err(|e| LogError::Parse {
            path: name.clone(),
            line: i + 1,
            message: e.to_string(),
        })?;
        records.push(rec);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> StepRecord {
        StepRecord {
            t: 3,
            agents: vec![AgentRecord {
                id: 0,
                x: 0.1 + 0.2,
                y: -1.0 / 3.0,
                yaw: std::f64::consts::PI,
                v: -0.0,
                action: [0.8, -0.6108652381980153],
                flags: FlagRecord {
                    aa: true,
                    al: false,
                },
                d_cl: 1e-300,
            }],
            resets: vec![0],
        }
    }

    #[test]
    fn field_order_is_fixed() {
        let line = sample().to_line();
        let keys = [
            "\"t\"",
            "\"agents\"",
            "\"id\"",
            "\"x\"",
            "\"y\"",
            "\"yaw\"",
            "\"v\"",
            "\"action\"",
            "\"flags\"",
            "\"aa\"",
            "\"al\"",
            "\"d_cl\"",
            "\"resets\"",
        ];
        let pos: Vec<usize> = keys.iter().map(|k| line.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{line}");
        assert!(line.contains("\"x\":3.0000000000000004e-1"));
    }

    #[test]
    fn lines_round_trip_bit_exact() {
        let rec = sample();
        let back = StepRecord::parse(&rec.to_line()).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.agents[0].v.to_bits(), (-0.0f64).to_bits());
    }
}

//! Collision rate, center-line deviation, speed and the composite score.
//!
//! Per simulation:
//!
//! - `C_aa`, `C_al`: percentage of steps in which at least one agent raised
//!   the agent-agent (resp. agent-lane) flag; `C_total = C_aa + C_al`
//! - `D`: mean absolute center-line offset over agents and steps, in cm
//! - `V`: mean absolute speed over agents and steps, in m/s
//!
//! For a set of models `M` the composite score of model `i` is
//!
//! ```text
//! S_i = -|M| C_i / sum_j C_j  -  |M| D_i / sum_j D_j  +  |M| V_i / sum_j V_j
//! ```
//!
//! so the scores always sum to `-|M|`.

use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::collision::CollisionFlags;
use crate::env::{StepOutput, StepRecord};

pub const CSV_HEADER: &str = "model,scenario,sim,C_aa,C_al,C_total,D_cm,V_mps";

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("no steps were accumulated")]
    NoSteps,
    #[error("step has {got} agents, accumulator expects {want}")]
    AgentCount { got: usize, want: usize },
    #[error("degenerate weight: {metric} sums to zero over all models")]
    DegenerateWeight { metric: &'static str },
    #[error("score table needs at least one model")]
    NoModels,
    #[error("metrics CSV {path}: {message}")]
    Csv { path: String, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsAccumulator {
    pub num_agents: usize,
    pub steps: u64,
    pub aa_steps: u64,
    pub al_steps: u64,
    pub sum_abs_lateral: f64,
    pub sum_speed: f64,
}

impl MetricsAccumulator {
    pub fn new(num_agents: usize) -> Self {
        Self {
            num_agents,
            ..Default::default()
        }
    }

    /// Adds one step given per-agent flags, center-line offsets and speeds.
    pub fn record(
        &mut self,
        flags: &[CollisionFlags],
        lateral: &[f64],
        speeds: &[f64],
    ) -> Result<(), MetricsError> {
        for got in [flags.len(), lateral.len(), speeds.len()] {
            if got != self.num_agents {
                return Err(MetricsError::AgentCount {
                    got,
                    want: self.num_agents,
                });
            }
        }
        self.steps += 1;
        self.aa_steps += u64::from(flags.iter().any(|f| f.agent_agent));
        self.al_steps += u64::from(flags.iter().any(|f| f.agent_lane));
        self.sum_abs_lateral += lateral.iter().map(|d| d.abs()).sum::<f64>();
        self.sum_speed += speeds.iter().map(|v| v.abs()).sum::<f64>();
        Ok(())
    }

    pub fn accumulate(&mut self, step: &StepOutput) -> Result<(), MetricsError> {
        let lateral: Vec<f64> = step.states.iter().map(|s| s.track.lateral).collect();
        let speeds: Vec<f64> = step.states.iter().map(|s| s.speed).collect();
        self.record(&step.flags, &lateral, &speeds)
    }

    pub fn accumulate_record(&mut self, rec: &StepRecord) -> Result<(), MetricsError> {
        let flags: Vec<CollisionFlags> = rec
            .agents
            .iter()
            .map(|a| CollisionFlags {
                agent_agent: a.flags.aa,
                agent_lane: a.flags.al,
            })
            .collect();
        let lateral: Vec<f64> = rec.agents.iter().map(|a| a.d_cl).collect();
        let speeds: Vec<f64> = rec.agents.iter().map(|a| a.v).collect();
        self.record(&flags, &lateral, &speeds)
    }

    pub fn finalize(&self) -> Result<MetricsRecord, MetricsError> {
        if self.steps == 0 || self.num_agents == 0 {
            return Err(MetricsError::NoSteps);
        }
        let steps = self.steps as f64;
        let samples = steps * self.num_agents as f64;
        let c_aa = 100.0 * self.aa_steps as f64 / steps;
        let c_al = 100.0 * self.al_steps as f64 / steps;
        Ok(MetricsRecord {
            c_aa,
            c_al,
            c_total: c_aa + c_al,
            d_cm: 100.0 * self.sum_abs_lateral / samples,
            v_mps: self.sum_speed / samples,
        })
    }
}

/// Metrics of one simulation, or a mean over several.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsRecord {
    /// Percent of steps with an agent-agent collision.
    pub c_aa: f64,
    pub c_al: f64,
    pub c_total: f64,
    /// Mean |center-line offset| in cm.
    pub d_cm: f64,
    pub v_mps: f64,
}

impl MetricsRecord {
    pub fn mean(records: &[MetricsRecord]) -> Option<MetricsRecord> {
        if records.is_empty() {
            return None;
        }
        let n = records.len() as f64;
        let sum = records
            .iter()
            .fold(MetricsRecord::default(), |a, r| MetricsRecord {
                c_aa: a.c_aa + r.c_aa,
                c_al: a.c_al + r.c_al,
                c_total: a.c_total + r.c_total,
                d_cm: a.d_cm + r.d_cm,
                v_mps: a.v_mps + r.v_mps,
            });
        Some(MetricsRecord {
            c_aa: sum.c_aa / n,
            c_al: sum.c_al / n,
            c_total: sum.c_total / n,
            d_cm: sum.d_cm / n,
            v_mps: sum.v_mps / n,
        })
    }
}

/// Recomputes a simulation's metrics from its trajectory log.
pub fn metrics_from_log(records: &[StepRecord]) -> Result<MetricsRecord, MetricsError> {
    let n = records.first().ok_or(MetricsError::NoSteps)?.agents.len();
    let mut acc = MetricsAccumulator::new(n);
    for r in records {
        acc.accumulate_record(r)?;
    }
    acc.finalize()
}

/// Composite score per model.
pub fn composite_scores(records: &[MetricsRecord]) -> Result<Vec<f64>, MetricsError> {
    if records.is_empty() {
        return Err(MetricsError::NoModels);
    }
    let m = records.len() as f64;
    let total = |f: fn(&MetricsRecord) -> f64, metric: &'static str| {
        let s: f64 = records.iter().map(f).sum();
        if s == 0.0 || !s.is_finite() {
            Err(MetricsError::DegenerateWeight { metric })
        } else {
            Ok(s)
        }
    };
    let c = total(|r| r.c_total, "C_total")?;
    let d = total(|r| r.d_cm, "D")?;
    let v = total(|r| r.v_mps, "V")?;
    Ok(records
        .iter()
        .map(|r| -m * r.c_total / c - m * r.d_cm / d + m * r.v_mps / v)
        .collect())
}

/// Models of one scenario with their averaged metrics and scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreTable {
    pub scenario: String,
    pub models: Vec<String>,
    pub records: Vec<MetricsRecord>,
    pub scores: Vec<f64>,
}

impl ScoreTable {
    pub fn new(
        scenario: impl Into<String>,
        models: Vec<String>,
        records: Vec<MetricsRecord>,
    ) -> Result<Self, MetricsError> {
        let scores = composite_scores(&records)?;
        Ok(Self {
            scenario: scenario.into(),
            models,
            records,
            scores,
        })
    }

    /// Index of the highest score; ties go to the first model.
    pub fn best(&self) -> usize {
        let mut best = 0;
        for (i, &s) in self.scores.iter().enumerate() {
            if s > self.scores[best] {
                best = i;
            }
        }
        best
    }
}

/// One row of the metrics CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub model: String,
    pub scenario: String,
    pub sim: u32,
    #[serde(rename = "C_aa")]
    pub c_aa: f64,
    #[serde(rename = "C_al")]
    pub c_al: f64,
    #[serde(rename = "C_total")]
    pub c_total: f64,
    #[serde(rename = "D_cm")]
    pub d_cm: f64,
    #[serde(rename = "V_mps")]
    pub v_mps: f64,
}

impl MetricsRow {
    pub fn new(model: &str, scenario: &str, sim: u32, m: &MetricsRecord) -> Self {
        Self {
            model: model.to_string(),
            scenario: scenario.to_string(),
            sim,
            c_aa: m.c_aa,
            c_al: m.c_al,
            c_total: m.c_total,
            d_cm: m.d_cm,
            v_mps: m.v_mps,
        }
    }

    pub fn record(&self) -> MetricsRecord {
        MetricsRecord {
            c_aa: self.c_aa,
            c_al: self.c_al,
            c_total: self.c_total,
            d_cm: self.d_cm,
            v_mps: self.v_mps,
        }
    }
}

pub fn write_csv<W: io::Write>(out: W, rows: &[MetricsRow]) -> Result<(), MetricsError> {
    let mut w = csv::Writer::from_writer(out);
    let to_err = |e: csv::Error| MetricsError::Csv {
        path: "<output>".into(),
        message: e.to_string(),
    };
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(',')).map_err(to_err)?;
    }
    for r in rows {
        w.serialize(r).map_err(to_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<MetricsRow>, MetricsError> {
    let path = path.as_ref();
    let err = |e: csv::Error| MetricsError::Csv {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let mut r = csv::Reader::from_path(path).map_err(err)?;
    let header: Vec<String> = r
        .headers()
        .map_err(err)?
        .iter()
        .map(str::to_string)
        .collect();
    if header.join(",") != CSV_HEADER {
        return Err(MetricsError::Csv {
            path: path.display().to_string(),
            message: format!(
                "expected header `{CSV_HEADER}`, found `{}`",
                header.join(",")
            ),
        });
    }
    r.deserialize()
        .collect::<Result<Vec<MetricsRow>, _>>()
        .map_err(err)
}

/// Groups rows by scenario, averages each model over its sims and scores the models.
/// Scenarios and models keep their first-appearance order.
pub fn score_rows(rows: &[MetricsRow]) -> Result<Vec<ScoreTable>, MetricsError> {
    let mut scenarios: Vec<&str> = Vec::new();
    for r in rows {
        if !scenarios.contains(&r.scenario.as_str()) {
            scenarios.push(&r.scenario);
        }
    }
    let mut tables = Vec::new();
    for sc in scenarios {
        let mut models: Vec<&str> = Vec::new();
        for r in rows.iter().filter(|r| r.scenario == sc) {
            if !models.contains(&r.model.as_str()) {
                models.push(&r.model);
            }
        }
        let means: Vec<MetricsRecord> = models
            .iter()
            .map(|m| {
                let recs: Vec<MetricsRecord> = rows
                    .iter()
                    .filter(|r| r.scenario == sc && r.model == *m)
                    .map(MetricsRow::record)
                    .collect();
                MetricsRecord::mean(&recs).expect("model has rows")
            })
            .collect();
        tables.push(ScoreTable::new(
            sc,
            models.iter().map(|m| m.to_string()).collect(),
            means,
        )?);
    }
    Ok(tables)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(c: f64, d: f64, v: f64) -> MetricsRecord {
        MetricsRecord {
            c_aa: c,
            c_al: 0.0,
            c_total: c,
            d_cm: d,
            v_mps: v,
        }
    }

    fn flags(aa: bool, al: bool) -> CollisionFlags {
        CollisionFlags {
            agent_agent: aa,
            agent_lane: al,
        }
    }

    #[test]
    fn accumulate_examples() {
        let mut acc = MetricsAccumulator::new(3);
        acc.record(&[flags(false, false); 3], &[0.02, -0.02, 0.02], &[0.7; 3])
            .unwrap();
        assert!((acc.sum_abs_lateral - 0.06).abs() < 1e-15);
        assert!((acc.sum_speed - 2.1).abs() < 1e-15);
        acc.record(
            &[flags(true, false), flags(false, false), flags(false, false)],
            &[0.0; 3],
            &[0.0; 3],
        )
        .unwrap();
        assert_eq!(acc.aa_steps, 1);
        acc.record(
            &[flags(true, false), flags(false, true), flags(false, false)],
            &[0.0; 3],
            &[0.0; 3],
        )
        .unwrap();
        assert_eq!((acc.aa_steps, acc.al_steps), (2, 1));
        assert!(matches!(
            acc.record(&[flags(false, false); 2], &[0.0; 2], &[0.0; 2]),
            Err(MetricsError::AgentCount { got: 2, want: 3 })
        ));
    }

    #[test]
    fn finalize_examples() {
        let mut acc = MetricsAccumulator::new(2);
        assert!(matches!(acc.finalize(), Err(MetricsError::NoSteps)));
        for k in 0..1200 {
            let f = flags(k < 12, false);
            acc.record(&[f, flags(false, false)], &[0.0; 2], &[0.0; 2])
                .unwrap();
        }
        let m = acc.finalize().unwrap();
        assert!((m.c_aa - 1.0).abs() < 1e-12);
        assert_eq!(m.c_total, m.c_aa + m.c_al);
        assert_eq!(m.v_mps, 0.0);
    }

    #[test]
    fn single_and_identical_models() {
        let one = composite_scores(&[rec(1.0, 5.0, 0.7)]).unwrap();
        assert!((one[0] + 1.0).abs() < 1e-15);
        let two = composite_scores(&[rec(1.0, 5.0, 0.7), rec(1.0, 5.0, 0.7)]).unwrap();
        assert_eq!(two[0], two[1]);
        assert!((two[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_collision_sum_is_degenerate() {
        let err = composite_scores(&[rec(0.0, 5.0, 0.7), rec(0.0, 4.0, 0.6)]).unwrap_err();
        assert!(err.to_string().contains("degenerate weight"));
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            MetricsRow::new("pp", "loop", 0, &rec(1.5, 3.0, 0.6)),
            MetricsRow::new("pp", "loop", 1, &rec(0.5, 1.0, 0.4)),
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        write_csv(std::fs::File::create(&path).unwrap(), &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(read_csv(&path).unwrap(), rows);
        let tables = score_rows(&rows).unwrap();
        assert_eq!(tables.len(), 1);
        assert!((tables[0].records[0].c_total - 1.0).abs() < 1e-15);
    }

    fn table() -> impl Strategy<Value = Vec<MetricsRecord>> {
        prop::collection::vec((0.01f64..50.0, 0.01f64..20.0, 0.01f64..0.8), 1..10)
            .prop_map(|v| v.into_iter().map(|(c, d, s)| rec(c, d, s)).collect())
    }

    proptest! {
        #[test]
        fn scores_sum_to_minus_model_count(t in table()) {
            let s = composite_scores(&t).unwrap();
            let sum: f64 = s.iter().sum();
            prop_assert!((sum + t.len() as f64).abs() < 1e-12);
        }

        #[test]
        fn scaling_a_metric_leaves_scores(t in table(), k in 0.01f64..100.0) {
            let base = composite_scores(&t).unwrap();
            let scaled: Vec<MetricsRecord> = t.iter().map(|r| rec(r.c_total * k, r.d_cm, r.v_mps)).collect();
            for (a, b) in base.iter().zip(composite_scores(&scaled).unwrap()) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn more_collisions_lower_own_score(t in table(), bump in 0.1f64..10.0) {
            prop_assume!(t.len() >= 2);
            let base = composite_scores(&t).unwrap();
            let mut worse = t.clone();
            worse[0].c_total += bump;
            let s = composite_scores(&worse).unwrap();
            prop_assert!(s[0] < base[0]);
            for j in 1..t.len() {
                prop_assert!(s[j] > base[j]);
            }
        }
    }
}

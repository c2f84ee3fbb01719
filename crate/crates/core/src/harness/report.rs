use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{write_atomic, HarnessError};
use crate::metrics::{read_csv, score_rows, ScoreTable};

/// Score tables plus their text and JSON renderings.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub tables: Vec<ScoreTable>,
    pub text: String,
    pub json: String,
}

#[derive(Serialize)]
struct ModelJson<'a> {
    model: &'a str,
    #[serde(rename = "C_aa")]
    c_aa: f64,
    #[serde(rename = "C_al")]
    c_al: f64,
    #[serde(rename = "C_total")]
    c_total: f64,
    #[serde(rename = "D_cm")]
    d_cm: f64,
    #[serde(rename = "V_mps")]
    v_mps: f64,
    #[serde(rename = "S")]
    score: f64,
    best: bool,
}

#[derive(Serialize)]
struct ScenarioJson<'a> {
    scenario: &'a str,
    models: Vec<ModelJson<'a>>,
}

fn to_json(tables: &[ScoreTable]) -> String {
    let doc: Vec<ScenarioJson> = tables
        .iter()
        .map(|t| ScenarioJson {
            scenario: &t.scenario,
            models: t
                .models
                .iter()
                .zip(&t.records)
                .zip(&t.scores)
                .enumerate()
                .map(|(i, ((m, r), &score))| ModelJson {
                    model: m,
                    c_aa: r.c_aa,
                    c_al: r.c_al,
                    c_total: r.c_total,
                    d_cm: r.d_cm,
                    v_mps: r.v_mps,
                    score,
                    best: i == t.best(),
                })
                .collect(),
        })
        .collect();
    serde_json::to_string_pretty(&doc).expect("report serializes")
}

type MetricRow = (&'static str, fn(&crate::metrics::MetricsRecord) -> f64);

/// Aligned text table per scenario: one column per model, best score starred.
pub fn format_report(tables: &[ScoreTable]) -> String {
    let mut out = String::new();
    for t in tables {
        let width = t.models.iter().map(|m| m.len()).max().unwrap_or(0).max(8) + 2;
        out.push_str(&format!("scenario: {}\n", t.scenario));
        out.push_str(&format!("{:<12}", "metric"));
        for m in &t.models {
            out.push_str(&format!("{m:>width$}"));
        }
        out.push('\n');
        let rows: [MetricRow; 5] = [
            ("C_aa (%)", |r| r.c_aa),
            ("C_al (%)", |r| r.c_al),
            ("C_total (%)", |r| r.c_total),
            ("D (cm)", |r| r.d_cm),
            ("V (m/s)", |r| r.v_mps),
        ];
        for (label, get) in rows {
            out.push_str(&format!("{label:<12}"));
            for r in &t.records {
                out.push_str(&format!("{:>width$.2}", get(r)));
            }
            out.push('\n');
        }
        out.push_str(&format!("{:<12}", "S"));
        let best = t.best();
        for (i, s) in t.scores.iter().enumerate() {
            let cell = format!("{s:.2}{}", if i == best { "*" } else { " " });
            out.push_str(&format!("{cell:>width$}"));
        }
        out.push_str("\n\n");
    }
    out
}

/// Scores a metrics CSV; with `out`, also writes `scores.txt` and `scores.json` there.
pub fn score_command(csv: &Path, out: Option<&Path>) -> Result<ScoreReport, HarnessError> {
    let rows = read_csv(csv)?;
    if rows.is_empty() {
        return Err(HarnessError::Invalid(format!(
            "{} has no rows",
            csv.display()
        )));
    }
    let tables = score_rows(&rows)?;
    let report = ScoreReport {
        text: format_report(&tables),
        json: to_json(&tables),
        tables,
    };
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(super::io_err(dir))?;
        write_atomic(&dir.join("scores.txt"), report.text.as_bytes())?;
        write_atomic(&dir.join("scores.json"), report.json.as_bytes())?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{write_csv, MetricsRecord, MetricsRow};

    #[test]
    fn report_marks_best_and_writes_files() {
        let r = |c: f64, d: f64, v: f64| MetricsRecord {
            c_aa: c,
            c_al: 0.0,
            c_total: c,
            d_cm: d,
            v_mps: v,
        };
        let rows = vec![
            MetricsRow::new("careful", "loop", 0, &r(0.5, 3.0, 0.7)),
            MetricsRow::new("reckless", "loop", 0, &r(20.0, 9.0, 0.8)),
        ];
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("m.csv");
        write_csv(fs::File::create(&csv).unwrap(), &rows).unwrap();
        let rep = score_command(&csv, Some(dir.path())).unwrap();
        assert_eq!(rep.tables[0].best(), 0);
        let s_line = rep.text.lines().find(|l| l.starts_with("S ")).unwrap();
        assert!(s_line.split_whitespace().nth(1).unwrap().ends_with('*'));
        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("scores.json")).unwrap())
                .unwrap();
        assert_eq!(json[0]["models"][0]["best"], true);
        assert_eq!(json[0]["models"][1]["best"], false);
    }
}

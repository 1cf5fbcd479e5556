//! Reports as JSON lines: a header with the experiment spec, one line per trial, and a
//! summary recomputable from the trial lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::runner::TrialRow;
use crate::spec::ExperimentSpec;

pub const FORMAT_VERSION: u32 = 1;

/// Order statistics of one quantity across trials (nearest-rank quantiles).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
}

impl Stats {
    pub fn from_values(values: &[f64]) -> Stats {
        if values.is_empty() {
            return Stats {
                min: 0.0,
                max: 0.0,
                mean: 0.0,
                p50: 0.0,
                p90: 0.0,
                p99: 0.0,
            };
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| v[((p * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
        Stats {
            min: v[0],
            max: v[v.len() - 1],
            mean: v.iter().sum::<f64>() / v.len() as f64,
            p50: q(0.5),
            p90: q(0.9),
            p99: q(0.99),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub correct: usize,
    pub max_fragility: Stats,
    pub mean_fragility: Stats,
    pub metrics: BTreeMap<String, Stats>,
}

impl Summary {
    pub fn from_rows(rows: &[TrialRow]) -> Summary {
        let column = |f: &dyn Fn(&TrialRow) -> f64| {
            Stats::from_values(&rows.iter().map(f).collect::<Vec<_>>())
        };
        let mut names: Vec<&String> = rows.iter().flat_map(|r| r.metrics.keys()).collect();
        names.sort();
        names.dedup();
        let metrics = names
            .into_iter()
            .map(|name| {
                let vals: Vec<f64> = rows
                    .iter()
                    .filter_map(|r| r.metrics.get(name).copied())
                    .collect();
                (name.clone(), Stats::from_values(&vals))
            })
            .collect();
        Summary {
            trials: rows.len(),
            correct: rows.iter().filter(|r| r.correct).count(),
            max_fragility: column(&|r| r.max_fragility as f64),
            mean_fragility: column(&|r| r.mean_fragility),
            metrics,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub spec: ExperimentSpec,
    pub rows: Vec<TrialRow>,
    pub summary: Summary,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum Line {
    Header { format: u32, spec: ExperimentSpec },
    Trial(TrialRow),
    Summary(Summary),
}

impl Report {
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        let header = Line::Header {
            format: FORMAT_VERSION,
            spec: self.spec.clone(),
        };
        push_line(&mut out, &header);
        for row in &self.rows {
            push_line(&mut out, &Line::Trial(row.clone()));
        }
        push_line(&mut out, &Line::Summary(self.summary.clone()));
        out
    }

    pub fn from_json_lines(text: &str) -> Result<Report> {
        let mut spec = None;
        let mut rows = Vec::new();
        let mut summary = None;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            match serde_json::from_str::<Line>(line)? {
                Line::Header { format, spec: s } => {
                    if format != FORMAT_VERSION {
                        return Err(HarnessError::Config(format!(
                            "unsupported report format {format}"
                        )));
                    }
                    spec = Some(s);
                }
                Line::Trial(row) => rows.push(row),
                Line::Summary(s) => summary = Some(s),
            }
        }
        let spec = spec.ok_or_else(|| HarnessError::Config("report has no header line".into()))?;
        let summary =
            summary.ok_or_else(|| HarnessError::Config("report has no summary line".into()))?;
        Ok(Report {
            spec,
            rows,
            summary,
        })
    }

    /// Per-element counts as `trial,element_index,role,count`; trials without
    /// a kept profile contribute no lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,element_index,role,count\n");
        for row in &self.rows {
            let Some(p) = &row.profile else { continue };
            for (i, c) in p.per_element.iter().enumerate() {
                let role = p.roles.get(i).map_or("unlabeled", String::as_str);
                writeln!(out, "{},{},{},{}", row.trial, i, role, c).unwrap();
            }
        }
        out
    }
}

fn push_line(out: &mut String, line: &Line) {
    out.push_str(&serde_json::to_string(line).expect("report lines serialize"));
    out.push('\n');
}

/// One line of a multi-report summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub source: String,
    pub algorithm: String,
    pub generator: String,
    pub n: usize,
    pub trials: usize,
    pub correct: usize,
    pub mean_runs: f64,
    pub mean_inv: f64,
    pub max_fragility: Stats,
}

pub fn aggregate(reports: &[(String, Report)]) -> Vec<AggregateRow> {
    reports
        .iter()
        .map(|(source, r)| {
            let trials = r.rows.len().max(1) as f64;
            AggregateRow {
                source: source.clone(),
                algorithm: r.spec.algorithm.to_string(),
                generator: r.spec.generator.to_string(),
                n: r.spec.n,
                trials: r.rows.len(),
                correct: r.rows.iter().filter(|row| row.correct).count(),
                mean_runs: r.rows.iter().map(|row| row.runs as f64).sum::<f64>() / trials,
                mean_inv: r.rows.iter().map(|row| row.inv as f64).sum::<f64>() / trials,
                max_fragility: Summary::from_rows(&r.rows).max_fragility,
            }
        })
        .collect()
}

/// Fixed-width table of aggregate rows.
pub fn aggregate_table(rows: &[AggregateRow]) -> String {
    let mut out = format!(
        "{:<20} {:<28} {:>8} {:>7} {:>8} {:>10} {:>8} {:>8} {:>8}\n",
        "algorithm", "generator", "n", "trials", "correct", "mean_inv", "p50", "p90", "max"
    );
    for r in rows {
        writeln!(
            out,
            "{:<20} {:<28} {:>8} {:>7} {:>8} {:>10.1} {:>8} {:>8} {:>8}",
            r.algorithm,
            r.generator,
            r.n,
            r.trials,
            r.correct,
            r.mean_inv,
            r.max_fragility.p50,
            r.max_fragility.p90,
            r.max_fragility.max
        )
        .unwrap();
    }
    out
}

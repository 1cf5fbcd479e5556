//! Bound sets: the inequalities each algorithm's report must satisfy.
//!
//! Every bound is `measured <= budget` per trial; a verdict reports the worst
//! trial and its slack `budget - measured`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::report::{Report, Summary};
use crate::runner::TrialRow;
use crate::spec::{Algorithm, ExperimentSpec};

// Envelope constants, frozen from a calibration sweep at n = 2^15 (50 seeds
// per bucket) with roughly 30% headroom over the worst observed ratio.

/// Envelope constant for `median_by_runs`: `C * log2(Runs + 2)^2`.
pub const C_MED: f64 = 16.0;
/// Envelope constant for `median_by_inv`: `C * log2(Inv + 2)^2`.
pub const C_MI: f64 = 1.25;
/// Envelope constant for `sort_by_inv`: `C * log2(Inv + 2)^2`.
pub const C_S: f64 = 1.5;
/// Two-run median fragility cap.
pub const TWO_RUNS_CAP: f64 = 12.0;
/// Randomized search: mean array fragility at most `C * m * log2(n) / n`.
pub const C_RANDOMIZED: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub bound: String,
    /// Worst trial, if the bound is per trial.
    pub trial: Option<usize>,
    pub measured: f64,
    pub budget: f64,
    pub slack: f64,
    pub pass: bool,
}

type Check = fn(&TrialRow, &ExperimentSpec) -> Result<(f64, f64)>;

pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        u64::BITS - (x - 1).leading_zeros()
    }
}

fn metric(row: &TrialRow, name: &str) -> Result<f64> {
    row.metrics
        .get(name)
        .copied()
        .ok_or_else(|| config(format!("trial {} lacks metric {name:?}", row.trial)))
}

fn envelope(c: f64, measure: f64) -> f64 {
    c * (measure + 2.0).log2().powi(2)
}

/// Bounds registered for `algorithm`, beyond correctness.
pub fn bounds_for(algorithm: Algorithm) -> Vec<(&'static str, Check)> {
    match algorithm {
        Algorithm::MinByRuns => vec![("fragility <= 2 + ceil(log2 Runs)", |r, _| {
            Ok((
                r.max_fragility as f64,
                2.0 + f64::from(ceil_log2(r.runs as u64)),
            ))
        })],
        Algorithm::ExtractSortedRun => vec![
            ("fragility <= 4", |r, _| Ok((r.max_fragility as f64, 4.0))),
            ("|I| <= 2 Inv", |r, _| {
                Ok((metric(r, "removed")?, 2.0 * r.inv as f64))
            }),
        ],
        Algorithm::MinByInv => vec![("fragility <= 4 + ceil(log2(|I| + 1)) + 1", |r, _| {
            let removed = metric(r, "removed")? as u64;
            Ok((
                r.max_fragility as f64,
                5.0 + f64::from(ceil_log2(removed + 1)),
            ))
        })],
        Algorithm::MedianTwoRuns => vec![("fragility <= 12", |r, _| {
            Ok((r.max_fragility as f64, TWO_RUNS_CAP))
        })],
        Algorithm::MedianByRuns => vec![
            ("fragility <= C_med log2(Runs + 2)^2", |r, _| {
                Ok((r.max_fragility as f64, envelope(C_MED, r.runs as f64)))
            }),
            ("type-A removals outside [a, b] and balanced", |r, _| {
                Ok((metric(r, "removal_violations")?, 0.0))
            }),
            ("type-B total <= 7 Runs ceil(log2 n)", |r, _| {
                Ok((metric(r, "short_runs")?, metric(r, "short_run_budget")?))
            }),
            ("live set shrinks by 1/28 per step", |r, _| {
                Ok((metric(r, "shrink_violations")?, 0.0))
            }),
        ],
        Algorithm::MedianByInv => vec![("fragility <= C_mi log2(Inv + 2)^2", |r, _| {
            Ok((r.max_fragility as f64, envelope(C_MI, r.inv as f64)))
        })],
        Algorithm::SortByInv => vec![
            ("fragility <= C_s log2(Inv + 2)^2", |r, _| {
                Ok((r.max_fragility as f64, envelope(C_S, r.inv as f64)))
            }),
            ("column probes per run element <= 1", |r, _| {
                Ok((metric(r, "column_probe_max")?, 1.0))
            }),
        ],
        Algorithm::ExpSearch => vec![("query fragility <= 2(floor(log2(k + 2)) + 2)", |r, _| {
            Ok((-metric(r, "query_min_slack")?, 0.0))
        })],
        Algorithm::OffsetSearch => vec![
            ("count(y) <= ceil(log2 n) + sum 112/d(x, y)", |r, _| {
                Ok((-metric(r, "amortized_min_slack")?, 0.0))
            }),
            ("per-search amortized cost <= 112/d(x, y)", |r, _| {
                Ok((-metric(r, "step_min_slack")?, 0.0))
            }),
        ],
        Algorithm::RandomizedSearch => vec![("mean array fragility <= 4 m log2(n) / n", |r, _| {
            let m = metric(r, "queries")?;
            let n = r.n as f64;
            Ok((
                metric(r, "array_mean_fragility")?,
                C_RANDOMIZED * m * n.log2() / n,
            ))
        })],
        Algorithm::NetworkSort => vec![("fragility <= p(p + 1)/2, p = ceil(log2 m)", |r, _| {
            let p = f64::from(ceil_log2(r.n as u64));
            Ok((r.max_fragility as f64, p * (p + 1.0) / 2.0))
        })],
        Algorithm::TournamentMin => vec![("winner fragility <= ceil(log2 m)", |r, _| {
            Ok((
                metric(r, "winner_fragility")?,
                f64::from(ceil_log2(r.n as u64)),
            ))
        })],
        Algorithm::Reset
        | Algorithm::SelectKth
        | Algorithm::MomSelect
        | Algorithm::SmallMedian
        | Algorithm::ExponentialMerge => Vec::new(),
    }
}

/// Evaluates the bound set named `bound_set` (an algorithm name, or
/// `correctness`) against `report`.
pub fn verify(report: &Report, bound_set: &str) -> Result<Vec<Verdict>> {
    let algorithm = report.spec.algorithm;
    let mut checks: Vec<(&str, Check)> = vec![("output matches audit oracle", |r, _| {
        Ok((if r.correct { 0.0 } else { 1.0 }, 0.0))
    })];
    if bound_set != "correctness" {
        let named: Algorithm = bound_set.parse().map_err(config)?;
        if named != algorithm {
            return Err(config(format!(
                "bound set {bound_set} does not apply to a {algorithm} report"
            )));
        }
        checks.extend(bounds_for(algorithm));
    }
    let mut verdicts = Vec::with_capacity(checks.len() + 2);
    for (name, check) in checks {
        let mut worst: Option<Verdict> = None;
        for row in &report.rows {
            let (measured, budget) = check(row, &report.spec)?;
            let slack = budget - measured;
            if worst.as_ref().is_none_or(|w| slack < w.slack) {
                worst = Some(Verdict {
                    bound: name.to_owned(),
                    trial: Some(row.trial),
                    measured,
                    budget,
                    slack,
                    pass: slack >= -1e-9,
                });
            }
        }
        verdicts.extend(worst);
    }
    let trials_ok = report.rows.len() == report.spec.trials
        && report.rows.iter().enumerate().all(|(i, r)| r.trial == i);
    verdicts.push(flag("rows cover every trial in order", trials_ok));
    let consistent = Summary::from_rows(&report.rows) == report.summary;
    verdicts.push(flag("summary recomputes from rows", consistent));
    Ok(verdicts)
}

fn flag(name: &str, ok: bool) -> Verdict {
    let measured = if ok { 0.0 } else { 1.0 };
    Verdict {
        bound: name.to_owned(),
        trial: None,
        measured,
        budget: 0.0,
        slack: 0.0 - measured,
        pass: ok,
    }
}

pub fn all_pass(verdicts: &[Verdict]) -> bool {
    verdicts.iter().all(|v| v.pass)
}

pub fn verdict_table(verdicts: &[Verdict]) -> String {
    let mut out = format!(
        "{:<6} {:<48} {:>6} {:>12} {:>12} {:>12}\n",
        "result", "bound", "trial", "measured", "budget", "slack"
    );
    for v in verdicts {
        let trial = v.trial.map_or_else(|| "-".to_owned(), |t| t.to_string());
        writeln!(
            out,
            "{:<6} {:<48} {:>6} {:>12.3} {:>12.3} {:>12.3}",
            if v.pass { "PASS" } else { "FAIL" },
            v.bound,
            trial,
            v.measured,
            v.budget,
            v.slack
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runner::run_experiment;
    use crate::spec::GeneratorKind;
    use crate::HarnessError;

    fn runs_report() -> Report {
        let spec = ExperimentSpec::new(Algorithm::MinByRuns, 512)
            .with_generator(GeneratorKind::ControlledRuns(16))
            .with_trials(5, 4);
        run_experiment(&spec).unwrap()
    }

    #[test]
    fn min_by_runs_passes_its_bound() {
        let verdicts = verify(&runs_report(), "min_by_runs").unwrap();
        assert_eq!(verdicts.len(), 4);
        assert!(all_pass(&verdicts), "{}", verdict_table(&verdicts));
    }

    #[test]
    fn fabricated_excess_fails_with_negative_slack() {
        let mut report = runs_report();
        report.rows[2].max_fragility = 40;
        let verdicts = verify(&report, "min_by_runs").unwrap();
        let bound = verdicts
            .iter()
            .find(|v| v.bound.starts_with("fragility"))
            .unwrap();
        assert!(!bound.pass);
        assert_eq!(bound.trial, Some(2));
        assert_eq!(bound.slack, 6.0 - 40.0);
        let summary = verdicts.last().unwrap();
        assert!(!summary.pass);
    }

    #[test]
    fn mismatched_bound_set_is_a_config_error() {
        let report = runs_report();
        assert!(matches!(
            verify(&report, "sort_by_inv"),
            Err(HarnessError::Config(_))
        ));
        assert!(matches!(
            verify(&report, "nonsense"),
            Err(HarnessError::Config(_))
        ));
        assert!(all_pass(&verify(&report, "correctness").unwrap()));
    }

    #[test]
    fn every_algorithm_yields_a_verdict_per_bound() {
        for &algo in Algorithm::ALL {
            let generator = match algo {
                Algorithm::MedianTwoRuns | Algorithm::ExponentialMerge => {
                    GeneratorKind::TwoRuns(30)
                }
                _ => GeneratorKind::ControlledInv(40),
            };
            let spec = ExperimentSpec::new(algo, 100)
                .with_generator(generator)
                .with_trials(2, 8);
            let report = run_experiment(&spec).unwrap();
            let verdicts = verify(&report, algo.name()).unwrap();
            assert_eq!(verdicts.len(), bounds_for(algo).len() + 3, "{algo}");
            assert!(verdicts.iter().all(|v| v.slack.is_finite()));
            assert!(all_pass(&verdicts), "{algo}\n{}", verdict_table(&verdicts));
        }
    }

    #[test]
    fn log_helper() {
        assert_eq!(
            [0, 1, 2, 3, 4, 5, 1024, 1025].map(ceil_log2),
            [0, 0, 1, 2, 2, 3, 10, 11]
        );
    }
}

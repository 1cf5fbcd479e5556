//! Runs an [`ExperimentSpec`]: one fresh ledger and random stream per trial,
//! trials in parallel, rows in trial order.

use std::collections::{BTreeMap, HashMap};

use fragile_core::adaptive::{
    self, count_inversions_oracle, extract_sorted_run, lower_median_rank, runs_oracle,
};
use fragile_core::primitives;
use fragile_core::search::{
    self, amortized_check_all, distance, exp_search_bound, OffsetSearchStructure, SearchTrace,
    SortedView, AMORTIZED_CONSTANT,
};
use fragile_core::selection::{self, SelectConfig};
use fragile_core::{ElementId, FragilityProfile, Ledger, RoleMap, RoleStats};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config, Result};
use crate::generators::{
    gen_adversarial_run_plus_one, gen_controlled_inv, gen_controlled_runs,
    gen_lower_bound_instance, gen_random, gen_two_runs, with_duplicates,
};
use crate::report::{Report, Summary};
use crate::seeds::{child_rng, child_seed};
use crate::spec::{Algorithm, ExperimentSpec, GeneratorKind, Workload};

/// Measurements of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub correct: bool,
    pub n: usize,
    /// Runs and inversions of the generated input (of the array for searches).
    pub runs: usize,
    pub inv: u64,
    pub max_fragility: u64,
    pub mean_fragility: f64,
    pub total_comparisons: u64,
    /// Maximum per-element count within each phase.
    pub phases: BTreeMap<String, u64>,
    pub by_role: BTreeMap<String, RoleStats>,
    /// Algorithm-specific measurements used by the verifiers.
    pub metrics: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<FragilityProfile>,
}

/// Values for one trial, after the generator and the duplicates option.
pub fn generate_input<R: Rng + ?Sized>(spec: &ExperimentSpec, rng: &mut R) -> Result<Vec<i64>> {
    let n = spec.n;
    let mut values = match spec.generator {
        GeneratorKind::Random => gen_random(n, rng),
        GeneratorKind::ControlledInv(t) => gen_controlled_inv(n, t, rng)?,
        GeneratorKind::ControlledRuns(t) => gen_controlled_runs(n, t, rng)?,
        GeneratorKind::AdversarialRunPlusOne => gen_adversarial_run_plus_one(n, rng)?,
        GeneratorKind::TwoRuns(s) => gen_two_runs(n, s, rng)?,
        GeneratorKind::LowerBound(k) => gen_lower_bound_instance(n, k, rng)?,
    };
    if spec.duplicates {
        with_duplicates(&mut values);
    }
    Ok(values)
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Report> {
    spec.validate()?;
    let rows = (0..spec.trials)
        .into_par_iter()
        .map(|trial| run_trial(spec, trial))
        .collect::<Result<Vec<_>>>()?;
    let summary = Summary::from_rows(&rows);
    Ok(Report {
        spec: spec.clone(),
        rows,
        summary,
    })
}

pub fn run_trial(spec: &ExperimentSpec, trial: usize) -> Result<TrialRow> {
    let mut rng = child_rng(spec.seed, trial);
    let mut t = if spec.algorithm.is_search() {
        search_trial(spec, &mut rng)?
    } else {
        let values = generate_input(spec, &mut rng)?;
        sequence_trial(spec, values, &mut rng)?
    };
    t.row.trial = trial;
    t.row.seed = child_seed(spec.seed, trial);
    Ok(t.finish(spec.profiles))
}

/// A trial in progress: its ledger plus the fields filled so far.
struct Measured {
    ledger: Ledger<i64>,
    roles: Option<RoleMap>,
    row: TrialRow,
}

impl Measured {
    fn new(ledger: Ledger<i64>, ids: &[ElementId]) -> Result<Self> {
        let runs = runs_oracle(&ledger, ids)?.count();
        let inv = count_inversions_oracle(&ledger, ids)?;
        let n = ids.len();
        Ok(Measured {
            ledger,
            roles: None,
            row: TrialRow {
                trial: 0,
                seed: 0,
                correct: false,
                n,
                runs,
                inv,
                max_fragility: 0,
                mean_fragility: 0.0,
                total_comparisons: 0,
                phases: BTreeMap::new(),
                by_role: BTreeMap::new(),
                metrics: BTreeMap::new(),
                profile: None,
            },
        })
    }

    fn finish(mut self, keep_profile: bool) -> TrialRow {
        let profile = self.ledger.profile(self.roles.as_ref());
        self.row.max_fragility = profile.max;
        self.row.mean_fragility = profile.mean;
        self.row.total_comparisons = self.ledger.total();
        self.row.by_role = profile.by_role.clone();
        let names: Vec<String> = self.ledger.phase_names().map(str::to_owned).collect();
        for name in names {
            if let Some(p) = self.ledger.phase_profile(&name, None) {
                self.row.phases.insert(name, p.max);
            }
        }
        if keep_profile {
            self.row.profile = Some(profile);
        }
        self.row
    }
}

fn label(ids: &[ElementId], role: &str, map: &mut RoleMap) {
    for &id in ids {
        map.insert(id, role.to_owned());
    }
}

/// At most two ascending runs of `ids`, as audited; the second may be empty.
fn two_runs<'a>(
    ledger: &Ledger<i64>,
    ids: &'a [ElementId],
) -> Result<(&'a [ElementId], &'a [ElementId])> {
    let rd = runs_oracle(ledger, ids)?;
    match rd.count() {
        1 => Ok((ids, &[])),
        2 => Ok((rd.run(ids, 0), rd.run(ids, 1))),
        r => Err(config(format!(
            "input has {r} runs; use generator two_runs(s) or adversarial_run_plus_one"
        ))),
    }
}

fn record(row: &mut TrialRow, name: &str, value: impl Into<f64>) {
    row.metrics.insert(name.to_owned(), value.into());
}

fn sequence_trial(
    spec: &ExperimentSpec,
    values: Vec<i64>,
    rng: &mut ChaCha8Rng,
) -> Result<Measured> {
    let original = values.clone();
    let (ledger, ids) = Ledger::new(values)?;
    let mut m = Measured::new(ledger, &ids)?;
    let sorted = m.ledger.audit_sorted(&ids)?;
    let median = sorted[lower_median_rank(ids.len())];
    let l = &mut m.ledger;
    match spec.algorithm {
        Algorithm::MinByRuns => {
            m.row.correct = adaptive::min_by_runs(l, &ids)? == sorted[0];
        }
        Algorithm::MinByInv => {
            let got = adaptive::min_by_inv(l, &ids)?;
            let (mut scratch, _) = Ledger::new(original)?;
            let removed = extract_sorted_run(&mut scratch, &ids)?.removed.len();
            m.row.correct = got == sorted[0];
            record(&mut m.row, "removed", removed as f64);
        }
        Algorithm::ExtractSortedRun => {
            let ex = extract_sorted_run(l, &ids)?;
            let mut all: Vec<ElementId> = ex.run.iter().chain(&ex.removed).copied().collect();
            all.sort_unstable();
            let ascending = l.audit_sorted(&ex.run)? == ex.run;
            m.row.correct = ascending && all == ids;
            let mut roles = RoleMap::new();
            label(&ex.run, "run", &mut roles);
            label(&ex.removed, "removed", &mut roles);
            m.roles = Some(roles);
            record(&mut m.row, "removed", ex.removed.len() as f64);
            record(&mut m.row, "marks", ex.marks_used as f64);
        }
        Algorithm::MedianByRuns => {
            let trace = adaptive::median_by_runs_traced(l, &ids)?;
            let rank: HashMap<ElementId, usize> =
                sorted.iter().enumerate().map(|(r, &id)| (id, r)).collect();
            let (a, b) = trace.rank_window();
            let mut removal_violations = 0usize;
            let mut shrink_violations = 0usize;
            for step in &trace.steps {
                if step.removed_low.len() != step.removed_high.len() {
                    removal_violations += 1;
                }
                removal_violations += step.removed_low.iter().filter(|id| rank[id] >= a).count();
                removal_violations += step.removed_high.iter().filter(|id| rank[id] <= b).count();
                if 28 * step.live_after() > 27 * step.live_before {
                    shrink_violations += 1;
                }
            }
            m.row.correct = trace.result == median;
            record(&mut m.row, "steps", trace.steps.len() as f64);
            record(&mut m.row, "direct", u8::from(trace.direct));
            record(&mut m.row, "stalled", u8::from(trace.stalled));
            record(&mut m.row, "final_set", trace.final_set as f64);
            record(&mut m.row, "short_runs", trace.short_runs.len() as f64);
            record(
                &mut m.row,
                "short_run_budget",
                (7 * trace.runs * trace.block_len) as f64,
            );
            record(&mut m.row, "removal_violations", removal_violations as f64);
            record(&mut m.row, "shrink_violations", shrink_violations as f64);
        }
        Algorithm::MedianTwoRuns => {
            let (a, b) = two_runs(l, &ids)?;
            m.row.correct = adaptive::median_two_runs(l, a, b)? == median;
        }
        Algorithm::MedianByInv => {
            m.row.correct = adaptive::median_by_inv(l, &ids)? == median;
        }
        Algorithm::SortByInv => {
            let trace = adaptive::sort_by_inv_traced(l, &ids)?;
            let probe_max = trace
                .run
                .iter()
                .map(|&r| l.phase_count(adaptive::phases::INV_SEARCH, r))
                .max()
                .unwrap_or(0);
            m.row.correct = trace.sorted == sorted;
            let mut roles = RoleMap::new();
            label(&trace.run, "run", &mut roles);
            label(&trace.removed, "removed", &mut roles);
            m.roles = Some(roles);
            record(&mut m.row, "removed", trace.removed.len() as f64);
            record(&mut m.row, "column_probe_max", probe_max as f64);
            let far = trace.search_distances.iter().copied().max().unwrap_or(0);
            record(&mut m.row, "max_search_distance", far as f64);
        }
        Algorithm::TournamentMin => {
            let w = primitives::tournament_min(l, &ids)?;
            m.row.correct = w == sorted[0];
            record(&mut m.row, "winner_fragility", l.count(w) as f64);
        }
        Algorithm::NetworkSort => {
            m.row.correct = primitives::network_sort(l, &ids)? == sorted;
        }
        Algorithm::ExponentialMerge => {
            let (a, b) = two_runs(l, &ids)?;
            m.row.correct = primitives::exponential_merge(l, a, b)? == sorted;
        }
        Algorithm::MomSelect => {
            m.row.correct = primitives::mom_select(l, &ids, spec.k)? == sorted[spec.k];
        }
        Algorithm::SmallMedian => {
            m.row.correct = primitives::small_median(l, &ids)? == median;
        }
        Algorithm::Reset => {
            let c = selection::reset(l, &ids, spec.k, rng)?;
            m.row.correct = c.ids.contains(&sorted[spec.k]);
            record(&mut m.row, "candidate_size", c.ids.len() as f64);
            record(&mut m.row, "depth", c.depth() as f64);
        }
        Algorithm::SelectKth => {
            let cfg = SelectConfig {
                epsilon: spec.epsilon,
                backend: spec.backend,
            };
            let out = selection::select_kth(l, &ids, spec.k, rng, cfg)?;
            m.row.correct = out.selected == sorted[spec.k];
            // the rest fall under the default role; labelling them all is costly
            let mut roles = RoleMap::new();
            label(&[out.selected], "selected", &mut roles);
            m.roles = Some(roles);
            record(&mut m.row, "sampled", u8::from(out.sampled));
            record(&mut m.row, "candidate_size", out.candidate_size as f64);
            record(&mut m.row, "filtered_size", out.filtered_size as f64);
            record(&mut m.row, "fragility_pre", out.fragility_pre as f64);
            let post = out.fragility_filter + out.fragility_backend;
            record(&mut m.row, "fragility_backend", post as f64);
        }
        Algorithm::ExpSearch | Algorithm::OffsetSearch | Algorithm::RandomizedSearch => {
            unreachable!("searches are handled by search_trial")
        }
    }
    Ok(m)
}

/// Query ranks (predecessor gaps) for one trial.
fn query_gaps<R: Rng + ?Sized>(spec: &ExperimentSpec, rng: &mut R) -> Vec<usize> {
    let n = spec.n;
    match spec.workload {
        Workload::Sweep => (1..=n).collect(),
        Workload::Uniform => (0..spec.query_count())
            .map(|_| rng.random_range(0..=n))
            .collect(),
        Workload::Skewed => (0..spec.query_count())
            .map(|_| {
                let u: f64 = rng.random();
                ((u * u * u) * (n + 1) as f64) as usize
            })
            .map(|g| g.min(n))
            .collect(),
    }
}

fn search_trial(spec: &ExperimentSpec, rng: &mut ChaCha8Rng) -> Result<Measured> {
    let n = spec.n;
    let gaps = query_gaps(spec, rng);
    // array holds 2i; the query for gap g is 2g - 1
    let mut values: Vec<i64> = (0..n as i64).map(|i| 2 * i).collect();
    values.extend(gaps.iter().map(|&g| 2 * g as i64 - 1));
    let (ledger, ids) = Ledger::new(values)?;
    let (array, queries) = ids.split_at(n);
    let mut m = Measured::new(ledger, array)?;
    let mut roles = RoleMap::new();
    label(array, "array", &mut roles);
    label(queries, "query", &mut roles);
    m.roles = Some(roles);
    let view = SortedView::new(array.to_vec());
    let l = &mut m.ledger;
    let mut correct = true;
    let mut metrics: Vec<(&str, f64)> = Vec::new();
    match spec.algorithm {
        Algorithm::ExpSearch => {
            let mut min_slack = i64::MAX;
            for (&q, &g) in queries.iter().zip(&gaps) {
                let res = search::exp_search(l, &view, q)?;
                correct &= res.gap() == g;
                let slack = exp_search_bound(res.rank()) as i64 - l.count(q) as i64;
                min_slack = min_slack.min(slack);
            }
            metrics.push(("query_min_slack", min_slack.min(i64::from(i32::MAX)) as f64));
        }
        Algorithm::RandomizedSearch => {
            for (&q, &g) in queries.iter().zip(&gaps) {
                correct &= search::randomized_search(l, &view, q, rng)?.gap() == g;
            }
            let sum: u64 = array.iter().map(|&y| l.count(y)).sum();
            metrics.push(("array_mean_fragility", sum as f64 / n as f64));
            metrics.push(("queries", queries.len() as f64));
        }
        Algorithm::OffsetSearch => {
            let mut s = OffsetSearchStructure::build(view);
            let positions = s.positions().clone();
            let audited: Vec<usize> = audited_positions(n);
            let mut trace = SearchTrace::new(n);
            let mut step_min_slack = f64::MAX;
            let mut step_violations = 0usize;
            for (&q, &g) in queries.iter().zip(&gaps) {
                let before: Vec<(u64, f64)> = audited
                    .iter()
                    .map(|&y| {
                        let id = array[y];
                        Ok((l.count(id), s.potential_audit(id)?.phi))
                    })
                    .collect::<Result<_>>()?;
                let res = trace.record(l, &positions, q, |l| s.search(l, q))?;
                correct &= res.gap() == g;
                for (&y, &(c0, phi0)) in audited.iter().zip(&before) {
                    let id = array[y];
                    let actual = (l.count(id) - c0) as f64;
                    let amortized = actual + s.potential_audit(id)?.phi - phi0;
                    let slack = AMORTIZED_CONSTANT / distance(res, y) as f64 - amortized;
                    step_min_slack = step_min_slack.min(slack);
                    if slack < -1e-9 {
                        step_violations += 1;
                    }
                }
            }
            let verdicts = amortized_check_all(&trace);
            let min_slack = verdicts.iter().map(|v| v.slack).fold(f64::MAX, f64::min);
            let violations = verdicts.iter().filter(|v| !v.pass).count();
            metrics.push(("amortized_min_slack", finite(min_slack)));
            metrics.push(("amortized_violations", violations as f64));
            metrics.push(("step_min_slack", finite(step_min_slack)));
            metrics.push(("step_violations", step_violations as f64));
            metrics.push(("audited_elements", audited.len() as f64));
        }
        _ => unreachable!("not a search algorithm"),
    }
    m.row.correct = correct;
    for (name, v) in metrics {
        record(&mut m.row, name, v);
    }
    Ok(m)
}

/// Positions whose potential is audited after every offset search.
fn audited_positions(n: usize) -> Vec<usize> {
    let stride = (n / 16).max(1);
    let mut ys: Vec<usize> = (0..n).step_by(stride).collect();
    if ys.last() != Some(&(n - 1)) {
        ys.push(n - 1);
    }
    ys
}

fn finite(x: f64) -> f64 {
    if x.is_finite() && x < f64::MAX {
        x
    } else {
        0.0
    }
}

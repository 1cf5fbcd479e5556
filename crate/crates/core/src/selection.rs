//! Rank-k selection that protects the selected element when k is small.
//!
//! [`reset`] repeatedly halves a uniform sample until it is `O(k)` large, then
//! walks back up: at each level the (k+1)-th smallest of the set returned from
//! below becomes a threshold and every element of the level's sample at or
//! below it survives. The result contains the rank-`k` element and has expected
//! size `2(k + 1)`.
//!
//! [`select_kth`] wraps it: for `k <= n^epsilon` it samples `n / k` elements,
//! filters the input down to a prefix `S'` of expected size `k(k + 1)` and hands
//! that to a [`Backend`]; otherwise the backend gets the whole input.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::{ElementId, Ledger};
use crate::primitives::{mom_select, network_sort, MOM_CUTOFF};

pub const PHASE_PRE: &str = "select-pre";
pub const PHASE_FILTER: &str = "select-filter";
pub const PHASE_BACKEND: &str = "select-backend";

/// Default exponent for the small-k threshold `n^epsilon`.
pub const DEFAULT_EPSILON: f64 = 0.01;

/// Final-stage selector applied to `S'`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Batcher network sort, then index.
    #[default]
    NetworkSort,
    /// Deterministic median of medians.
    MedianOfMedians,
}

impl Backend {
    pub fn select<T: Ord>(
        self,
        ledger: &mut Ledger<T>,
        ids: &[ElementId],
        k: usize,
    ) -> Result<ElementId> {
        if k >= ids.len() {
            return Err(Error::RankOutOfRange { k, len: ids.len() });
        }
        match self {
            Backend::NetworkSort => Ok(network_sort(ledger, ids)?[k]),
            Backend::MedianOfMedians => mom_select(ledger, ids, k),
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "network_sort" | "network" => Ok(Backend::NetworkSort),
            "mom" | "median_of_medians" => Ok(Backend::MedianOfMedians),
            other => Err(format!("unknown backend {other:?}")),
        }
    }
}

/// Nested samples `levels[0] = X ⊇ levels[1] ⊇ ...` and the sets returned at
/// each level on the way back (`back_sets[0]` is the final candidate set).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleChain {
    pub levels: Vec<Vec<ElementId>>,
    pub back_sets: Vec<Vec<ElementId>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub ids: Vec<ElementId>,
    /// Threshold: every input element at or below it is in `ids`.
    pub pivot: ElementId,
    /// An element above `pivot`, when one was found.
    pub guard: Option<ElementId>,
    pub chain: SampleChain,
}

impl CandidateSet {
    /// Number of nested calls, i.e. `ℓ + 1`.
    pub fn depth(&self) -> usize {
        self.chain.levels.len()
    }
}

fn is_base_case(len: usize, k: usize) -> bool {
    2 * (k + 1) >= len
}

fn half_sample<R: Rng + ?Sized>(ids: &[ElementId], size: usize, rng: &mut R) -> Vec<ElementId> {
    let mut pool = ids.to_vec();
    for i in 0..size {
        let j = rng.random_range(i..pool.len());
        pool.swap(i, j);
    }
    pool.truncate(size);
    pool
}

/// Threshold `z` of rank `k` in `from`, plus a guard of rank `k + 1` when one
/// exists.
fn thresholds<T: Ord>(
    ledger: &mut Ledger<T>,
    from: &[ElementId],
    k: usize,
) -> Result<(ElementId, Option<ElementId>)> {
    if from.len() <= MOM_CUTOFF {
        // the selection base case would sort anyway; sort once for both ranks
        let sorted = network_sort(ledger, from)?;
        return Ok((sorted[k.min(from.len() - 1)], sorted.get(k + 1).copied()));
    }
    let z = mom_select(ledger, from, k.min(from.len() - 1))?;
    let guard = if k + 1 < from.len() {
        Some(mom_select(ledger, from, k + 1)?)
    } else {
        None
    };
    Ok((z, guard))
}

/// Keeps the elements of `ids` at or below `z`.
///
/// With a guard `g > z`, each element is first compared with `g` and only
/// those below it meet `z`, so `z` is charged for the few elements under `g`
/// rather than for all of `ids`. The rank-`k` element is typically `z`; the
/// guard never is.
fn at_or_below<T: Ord>(
    ledger: &mut Ledger<T>,
    ids: &[ElementId],
    z: ElementId,
    guard: Option<ElementId>,
) -> Result<Vec<ElementId>> {
    let mut kept = Vec::new();
    for &x in ids {
        if x == z {
            kept.push(x);
            continue;
        }
        if let Some(g) = guard {
            if x == g || !ledger.less(x, g)? {
                continue;
            }
        }
        if ledger.less(x, z)? {
            kept.push(x);
        }
    }
    Ok(kept)
}

pub fn reset<T: Ord, R: Rng + ?Sized>(
    ledger: &mut Ledger<T>,
    x: &[ElementId],
    k: usize,
    rng: &mut R,
) -> Result<CandidateSet> {
    if k >= x.len() {
        return Err(Error::RankOutOfRange { k, len: x.len() });
    }
    let mut levels = vec![x.to_vec()];
    while !is_base_case(levels.last().unwrap().len(), k) {
        let top = levels.last().unwrap();
        let next = half_sample(top, top.len() / 2, rng);
        levels.push(next);
    }
    let mut back_sets = vec![Vec::new(); levels.len()];
    let mut pivot = levels[levels.len() - 1][0];
    let mut guard = None;
    for i in (0..levels.len()).rev() {
        let from = if i + 1 == levels.len() {
            &levels[i]
        } else {
            &back_sets[i + 1]
        };
        let (z, own) = thresholds(ledger, from, k)?;
        // a deeper guard exceeds that level's pivot, hence z
        guard = own.or(guard);
        pivot = z;
        back_sets[i] = at_or_below(ledger, &levels[i], z, guard)?;
    }
    let ids = back_sets[0].clone();
    Ok(CandidateSet {
        ids,
        pivot,
        guard,
        chain: SampleChain { levels, back_sets },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectConfig {
    pub epsilon: f64,
    pub backend: Backend,
}

impl Default for SelectConfig {
    fn default() -> Self {
        SelectConfig {
            epsilon: DEFAULT_EPSILON,
            backend: Backend::NetworkSort,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    pub selected: ElementId,
    /// Whether the small-k sampling branch ran.
    pub sampled: bool,
    pub sample_size: usize,
    pub candidate_size: usize,
    /// `|S'|`, the set handed to the backend.
    pub filtered_size: usize,
    /// Comparisons on the selected element before `S'` is built.
    pub fragility_pre: u64,
    /// Comparisons on the selected element while building `S'`.
    pub fragility_filter: u64,
    pub fragility_backend: u64,
}

/// Returns the rank-`k` element (0-based, strict order) of `x`.
///
/// Charges comparisons to the phases [`PHASE_PRE`], [`PHASE_FILTER`] and
/// [`PHASE_BACKEND`]; the reported per-phase counts assume a fresh session.
pub fn select_kth<T: Ord, R: Rng + ?Sized>(
    ledger: &mut Ledger<T>,
    x: &[ElementId],
    k: usize,
    rng: &mut R,
    config: SelectConfig,
) -> Result<SelectionOutcome> {
    let n = x.len();
    if k >= n {
        return Err(Error::RankOutOfRange { k, len: n });
    }
    let mut outcome = SelectionOutcome {
        selected: x[0],
        sampled: false,
        sample_size: 0,
        candidate_size: 0,
        filtered_size: n,
        fragility_pre: 0,
        fragility_filter: 0,
        fragility_backend: 0,
    };
    if n == 1 {
        return Ok(outcome);
    }
    let sample_size = (n / k.max(1)).max(1);
    let filtered = if (k as f64) <= (n as f64).powf(config.epsilon) && k < sample_size {
        ledger.set_phase(PHASE_PRE);
        let sample = half_sample(x, sample_size, rng);
        let candidates = reset(ledger, &sample, k, rng)?;
        let (z, own) = thresholds(ledger, &candidates.ids, k)?;
        let guard = own.or(candidates.guard);
        ledger.set_phase(PHASE_FILTER);
        let filtered = at_or_below(ledger, x, z, guard)?;
        outcome.sampled = true;
        outcome.sample_size = sample_size;
        outcome.candidate_size = candidates.ids.len();
        outcome.filtered_size = filtered.len();
        filtered
    } else {
        x.to_vec()
    };
    ledger.set_phase(PHASE_BACKEND);
    let selected = config.backend.select(ledger, &filtered, k)?;
    ledger.clear_phase();
    outcome.selected = selected;
    outcome.fragility_pre = ledger.phase_count(PHASE_PRE, selected);
    outcome.fragility_filter = ledger.phase_count(PHASE_FILTER, selected);
    outcome.fragility_backend = ledger.phase_count(PHASE_BACKEND, selected);
    Ok(outcome)
}

/// Fragility of the selected element across trials, split by phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedFragilityReport {
    pub trials: usize,
    pub pre_mean: f64,
    pub pre_max: u64,
    /// Filter and backend phases together.
    pub backend_mean: f64,
    pub backend_max: u64,
    pub mean_candidate_size: f64,
    pub mean_filtered_size: f64,
}

/// Aggregates outcomes; meaningful from about 100 trials on.
pub fn selected_fragility_report(outcomes: &[SelectionOutcome]) -> SelectedFragilityReport {
    let trials = outcomes.len();
    let denom = trials.max(1) as f64;
    let post = |o: &SelectionOutcome| o.fragility_filter + o.fragility_backend;
    SelectedFragilityReport {
        trials,
        pre_mean: outcomes.iter().map(|o| o.fragility_pre as f64).sum::<f64>() / denom,
        pre_max: outcomes.iter().map(|o| o.fragility_pre).max().unwrap_or(0),
        backend_mean: outcomes.iter().map(|o| post(o) as f64).sum::<f64>() / denom,
        backend_max: outcomes.iter().map(post).max().unwrap_or(0),
        mean_candidate_size: outcomes
            .iter()
            .map(|o| o.candidate_size as f64)
            .sum::<f64>()
            / denom,
        mean_filtered_size: outcomes.iter().map(|o| o.filtered_size as f64).sum::<f64>() / denom,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reset_base_case_returns_everything() {
        let (mut l, ids) = Ledger::new(vec![4, 2, 3, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let c = reset(&mut l, &ids, 3, &mut rng).unwrap();
        assert_eq!(c.depth(), 1);
        assert_eq!(c.pivot, ids[0]);
        assert_eq!(c.ids, ids);
    }

    #[test]
    fn reset_rejects_bad_rank() {
        let (mut l, ids) = Ledger::new(vec![1, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            reset(&mut l, &ids, 2, &mut rng),
            Err(Error::RankOutOfRange { k: 2, len: 2 })
        );
    }

    #[test]
    fn reset_chain_shape() {
        let values: Vec<i64> = (0..1000).rev().collect();
        let (mut l, ids) = Ledger::new(values).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let k = 3;
        let c = reset(&mut l, &ids, k, &mut rng).unwrap();
        let sizes: Vec<usize> = c.chain.levels.iter().map(Vec::len).collect();
        // 1000 -> 500 -> 250 -> 125 -> 62 -> 31 -> 15 -> 7 (stops: 2(k+1) >= 7)
        assert_eq!(sizes, vec![1000, 500, 250, 125, 62, 31, 15, 7]);
        for (i, w) in sizes.windows(2).enumerate() {
            assert_eq!(w[1], w[0] / 2, "level {i}");
        }
        for (level, back) in c.chain.levels.iter().zip(&c.chain.back_sets) {
            assert!(back.iter().all(|b| level.contains(b)));
            assert!(back.len() > k);
        }
        let oracle = l.audit_sorted(&ids).unwrap();
        assert!(c.ids.contains(&oracle[k]));
    }

    #[test]
    fn guarded_filter_charges_threshold_only_below_guard() {
        let values: Vec<i64> = (0..100).rev().collect();
        let (mut l, ids) = Ledger::new(values).unwrap();
        let (z, g) = (ids[97], ids[96]); // values 2 and 3
        let kept = at_or_below(&mut l, &ids, z, Some(g)).unwrap();
        assert_eq!(kept, vec![ids[97], ids[98], ids[99]]);
        assert_eq!(l.count(z), 2);
        assert_eq!(l.count(g), 98);
        let (mut l2, ids2) = Ledger::new((0..100).rev().collect::<Vec<i64>>()).unwrap();
        assert_eq!(at_or_below(&mut l2, &ids2, ids2[97], None).unwrap(), kept);
        assert_eq!(l2.count(ids2[97]), 99);
    }

    #[test]
    fn rank_k_element_never_pays_for_a_whole_level() {
        let k = 2;
        let mut worst = 0;
        for seed in 0..300 {
            let (mut l, ids) = Ledger::new((0..4096).collect::<Vec<i64>>()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = reset(&mut l, &ids, k, &mut rng).unwrap();
            assert!(c.ids.contains(&ids[k]));
            if let Some(g) = c.guard {
                assert!(l.audit_compare_strict(c.pivot, g).unwrap().is_lt());
            }
            worst = worst.max(l.count(ids[k]));
        }
        assert!(worst < 200, "rank-k element compared {worst} times");
    }

    #[test]
    fn select_singleton_is_free() {
        let (mut l, ids) = Ledger::new(vec![42]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = select_kth(&mut l, &ids, 0, &mut rng, SelectConfig::default()).unwrap();
        assert_eq!(out.selected, ids[0]);
        assert_eq!(l.total(), 0);
    }

    #[test]
    fn select_median_of_hundred() {
        let values: Vec<i64> = (1..=100).map(|v| (v * 37) % 101).collect();
        let (mut l, ids) = Ledger::new(values).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for backend in [Backend::NetworkSort, Backend::MedianOfMedians] {
            let cfg = SelectConfig {
                epsilon: 0.25,
                backend,
            };
            let out = select_kth(&mut l, &ids, 49, &mut rng, cfg).unwrap();
            assert_eq!(out.selected, l.audit_sorted(&ids).unwrap()[49]);
        }
    }

    #[test]
    fn sampled_branch_is_exact() {
        let values: Vec<i64> = (0..4096).map(|v| (v * 1237) % 4096).collect();
        let (mut l, ids) = Ledger::new(values).unwrap();
        let oracle = l.audit_sorted(&ids).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (k, &expected) in oracle.iter().enumerate().take(8) {
            let out = select_kth(
                &mut l,
                &ids,
                k,
                &mut rng,
                SelectConfig {
                    epsilon: 0.25,
                    backend: Backend::NetworkSort,
                },
            )
            .unwrap();
            assert!(out.sampled);
            assert_eq!(out.selected, expected);
        }
    }

    #[test]
    fn unsampled_large_elements_untouched_before_filter() {
        let values: Vec<i64> = (0..2048).collect();
        let (mut l, ids) = Ledger::new(values).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let k = 2;
        let sample = half_sample(&ids, 2048 / k, &mut rng);
        let mut probe_rng = ChaCha8Rng::seed_from_u64(8);
        let out = select_kth(
            &mut l,
            &ids,
            k,
            &mut probe_rng,
            SelectConfig {
                epsilon: 0.25,
                backend: Backend::NetworkSort,
            },
        )
        .unwrap();
        assert!(out.sampled);
        for &id in &ids {
            if !sample.contains(&id) {
                assert_eq!(l.phase_count(PHASE_PRE, id), 0);
            }
        }
    }

    #[test]
    fn report_aggregates() {
        let mk = |pre, back| SelectionOutcome {
            selected: ElementId::from_index(0),
            sampled: true,
            sample_size: 10,
            candidate_size: 4,
            filtered_size: 6,
            fragility_pre: pre,
            fragility_filter: 1,
            fragility_backend: back,
        };
        let r = selected_fragility_report(&[mk(0, 3), mk(4, 5)]);
        assert_eq!(r.trials, 2);
        assert_eq!(r.pre_mean, 2.0);
        assert_eq!(r.pre_max, 4);
        assert_eq!(r.backend_mean, 5.0);
        assert_eq!(r.backend_max, 6);
    }
}

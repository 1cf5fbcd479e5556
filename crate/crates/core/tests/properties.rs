//! Property tests against oracles that never touch the ledger: a std sort of
//! `(value, index)` pairs, and brute-force run and inversion counts.

use fragile_core::adaptive::{
    count_inversions_oracle, extract_sorted_run, median_by_inv, median_by_runs, median_two_runs,
    min_by_inv, min_by_runs, runs_oracle, sort_by_inv,
};
use fragile_core::primitives::{
    exponential_merge, mom_select, network_sort, small_median, tournament_min,
};
use fragile_core::search::{
    exp_search, exp_search_bound, randomized_search, OffsetSearchStructure, SortedView,
};
use fragile_core::selection::{reset, select_kth, Backend, SelectConfig};
use fragile_core::{ElementId, Ledger};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Ids in strict order: by value, then by input position.
fn oracle(values: &[i64]) -> Vec<ElementId> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by_key(|&i| (values[i], i));
    idx.into_iter().map(ElementId::from_index).collect()
}

fn brute_runs(values: &[i64]) -> usize {
    1 + values.windows(2).filter(|w| w[1] < w[0]).count()
}

fn brute_inversions(values: &[i64]) -> u64 {
    let mut inv = 0;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            inv += u64::from(values[j] < values[i]);
        }
    }
    inv
}

fn ceil_log2(m: usize) -> u64 {
    u64::from(m.next_power_of_two().trailing_zeros())
}

fn session(values: &[i64]) -> (Ledger<i64>, Vec<ElementId>) {
    Ledger::new(values.to_vec()).unwrap()
}

fn max_count(l: &Ledger<i64>) -> u64 {
    l.counts().iter().copied().max().unwrap_or(0)
}

fn sequence() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-40i64..40, 1..160)
}

/// Concatenated ascending chunks: a few runs over a long input.
fn few_runs() -> impl Strategy<Value = Vec<i64>> {
    (1usize..=4, 1500usize..3000, any::<u64>()).prop_map(|(runs, n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<i64> = (0..n)
            .map(|_| rand::Rng::random_range(&mut rng, 0..1_000_000))
            .collect();
        let len = n.div_ceil(runs);
        for chunk in v.chunks_mut(len) {
            chunk.sort_unstable();
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn every_comparison_charges_two_elements(values in sequence()) {
        let (mut l, ids) = session(&values);
        network_sort(&mut l, &ids).unwrap();
        prop_assert_eq!(l.counts().iter().sum::<u64>(), 2 * l.total());
        let before = l.total();
        l.audit_sorted(&ids).unwrap();
        prop_assert_eq!(l.total(), before);
    }

    #[test]
    fn network_sort_sorts_within_depth(values in sequence()) {
        let (mut l, ids) = session(&values);
        prop_assert_eq!(network_sort(&mut l, &ids).unwrap(), oracle(&values));
        let p = ceil_log2(values.len());
        prop_assert!(max_count(&l) <= p * (p + 1) / 2);
    }

    #[test]
    fn tournament_winner_plays_log_rounds(values in sequence()) {
        let (mut l, ids) = session(&values);
        let w = tournament_min(&mut l, &ids).unwrap();
        prop_assert_eq!(w, oracle(&values)[0]);
        prop_assert!(l.count(w) <= ceil_log2(values.len()));
    }

    #[test]
    fn selection_primitives_match_oracle(values in sequence(), pick in any::<prop::sample::Index>()) {
        let sorted = oracle(&values);
        let k = pick.index(values.len());
        let (mut l, ids) = session(&values);
        prop_assert_eq!(mom_select(&mut l, &ids, k).unwrap(), sorted[k]);
        prop_assert_eq!(small_median(&mut l, &ids).unwrap(), sorted[(values.len() - 1) / 2]);
    }

    #[test]
    fn exponential_merge_of_two_runs(values in sequence(), mask in prop::collection::vec(any::<bool>(), 160)) {
        let sorted = oracle(&values);
        let (a, b): (Vec<ElementId>, Vec<ElementId>) = sorted.iter().partition(|id| mask[id.index()]);
        let (mut l, _) = session(&values);
        prop_assert_eq!(exponential_merge(&mut l, &a, &b).unwrap(), sorted);
    }

    #[test]
    fn searches_find_the_predecessor(n in 1usize..300, gaps in prop::collection::vec(0usize..300, 1..40), seed in any::<u64>()) {
        let gaps: Vec<usize> = gaps.into_iter().map(|g| g % (n + 1)).collect();
        let mut values: Vec<i64> = (0..n as i64).map(|i| 2 * i).collect();
        values.extend(gaps.iter().map(|&g| 2 * g as i64 - 1));
        let (mut l, ids) = session(&values);
        let view = SortedView::new(ids[..n].to_vec());
        let mut offset = OffsetSearchStructure::build(view.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (&q, &g) in ids[n..].iter().zip(&gaps) {
            let before = l.count(q);
            let res = exp_search(&mut l, &view, q).unwrap();
            prop_assert_eq!(res.gap(), g);
            prop_assert!(l.count(q) - before <= exp_search_bound(res.rank()));
            prop_assert_eq!(randomized_search(&mut l, &view, q, &mut rng).unwrap().gap(), g);
            prop_assert_eq!(offset.search(&mut l, q).unwrap().gap(), g);
        }
    }

    #[test]
    fn disorder_oracles_match_brute_force(values in sequence()) {
        let (l, ids) = session(&values);
        prop_assert_eq!(runs_oracle(&l, &ids).unwrap().count(), brute_runs(&values));
        prop_assert_eq!(count_inversions_oracle(&l, &ids).unwrap(), brute_inversions(&values));
        prop_assert_eq!(l.total(), 0);
    }

    #[test]
    fn min_by_runs_bound(values in sequence()) {
        let (mut l, ids) = session(&values);
        prop_assert_eq!(min_by_runs(&mut l, &ids).unwrap(), oracle(&values)[0]);
        prop_assert!(max_count(&l) <= 2 + ceil_log2(brute_runs(&values)));
    }

    #[test]
    fn extraction_structure(values in sequence()) {
        let sorted = oracle(&values);
        let (mut l, ids) = session(&values);
        let ex = extract_sorted_run(&mut l, &ids).unwrap();
        prop_assert!(max_count(&l) <= 4);
        prop_assert!(ex.removed.len() as u64 <= 2 * brute_inversions(&values));
        let rank = |id: &ElementId| sorted.iter().position(|s| s == id).unwrap();
        prop_assert!(ex.run.windows(2).all(|w| rank(&w[0]) < rank(&w[1])));
        let mut all: Vec<ElementId> = ex.run.iter().chain(&ex.removed).copied().collect();
        all.sort();
        prop_assert_eq!(all, ids);
        let (mut l2, ids2) = session(&values);
        prop_assert_eq!(min_by_inv(&mut l2, &ids2).unwrap(), sorted[0]);
        prop_assert!(max_count(&l2) <= 5 + ceil_log2(ex.removed.len() + 1));
    }

    #[test]
    fn adaptive_medians_and_sort(values in sequence()) {
        let sorted = oracle(&values);
        let median = sorted[(values.len() - 1) / 2];
        let (mut l, ids) = session(&values);
        prop_assert_eq!(median_by_runs(&mut l, &ids).unwrap(), median);
        let (mut l, ids) = session(&values);
        prop_assert_eq!(median_by_inv(&mut l, &ids).unwrap(), median);
        let (mut l, ids) = session(&values);
        prop_assert_eq!(sort_by_inv(&mut l, &ids).unwrap(), sorted);
    }

    #[test]
    fn two_run_median(values in sequence(), mask in prop::collection::vec(any::<bool>(), 160)) {
        let sorted = oracle(&values);
        let (a, b): (Vec<ElementId>, Vec<ElementId>) = sorted.iter().partition(|id| mask[id.index()]);
        let (mut l, _) = session(&values);
        prop_assert_eq!(median_two_runs(&mut l, &a, &b).unwrap(), sorted[(values.len() - 1) / 2]);
        prop_assert!(max_count(&l) <= 12);
    }

    #[test]
    fn sampled_selection_is_exact(values in prop::collection::vec(-500i64..500, 64..600), k in 0usize..8, seed in any::<u64>()) {
        let sorted = oracle(&values);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut l, ids) = session(&values);
        let c = reset(&mut l, &ids, k, &mut rng).unwrap();
        prop_assert!(c.ids.contains(&sorted[k]));
        for backend in [Backend::NetworkSort, Backend::MedianOfMedians] {
            let (mut l, ids) = session(&values);
            let cfg = SelectConfig { epsilon: 0.5, backend };
            let out = select_kth(&mut l, &ids, k, &mut rng, cfg).unwrap();
            prop_assert_eq!(out.selected, sorted[k]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn median_by_runs_on_long_inputs(values in few_runs()) {
        let (mut l, ids) = session(&values);
        prop_assert_eq!(median_by_runs(&mut l, &ids).unwrap(), oracle(&values)[(values.len() - 1) / 2]);
    }
}

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::lower_median_rank;
use super::runs::count_runs;
use crate::error::{Error, Result};
use crate::ledger::{ElementId, Ledger};
use crate::primitives::{ceil_log2, network_sort, small_median};

pub const PHASE_SCAN: &str = "runs-scan";
pub const PHASE_PARTITION: &str = "runs-partition";
pub const PHASE_FINAL: &str = "runs-final";

/// One balanced removal step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MedianRunsStep {
    /// `N`, elements of long runs before the step.
    pub live_before: usize,
    /// Elements already moved out as short runs.
    pub pool: usize,
    /// Number of runs whose low prefixes were eligible, after the safety check.
    pub t_low: usize,
    pub t_high: usize,
    pub removed_low: Vec<ElementId>,
    pub removed_high: Vec<ElementId>,
}

impl MedianRunsStep {
    pub fn live_after(&self) -> usize {
        self.live_before - self.removed_low.len() - self.removed_high.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MedianRunsTrace {
    pub n: usize,
    pub runs: usize,
    /// `ceil(log2 n)`, the block length.
    pub block_len: usize,
    /// The whole input went straight to the final median.
    pub direct: bool,
    pub steps: Vec<MedianRunsStep>,
    /// Elements of runs dropped for being shorter than `7 * block_len`.
    pub short_runs: Vec<ElementId>,
    /// Stopped early because no removal passed the safety check.
    pub stalled: bool,
    pub final_set: usize,
    pub result: ElementId,
}

impl MedianRunsTrace {
    /// Half-width `4 * Runs * ceil(log2 n)` of the protected rank window.
    pub fn window(&self) -> usize {
        4 * self.runs * self.block_len
    }

    /// The protected window `[a, b]` around the lower-median rank.
    pub fn rank_window(&self) -> (usize, usize) {
        let r0 = lower_median_rank(self.n);
        (r0.saturating_sub(self.window()), r0 + self.window())
    }

    pub fn stop_threshold(&self) -> usize {
        64 * self.runs * self.block_len
    }
}

struct LiveRun<'a> {
    index: usize,
    ids: &'a [ElementId],
    lo: usize,
    hi: usize,
}

impl LiveRun<'_> {
    fn len(&self) -> usize {
        self.hi - self.lo
    }
}

/// Per-run candidate for a partition step.
struct Partition {
    run: usize,
    element: ElementId,
    /// Elements of the run on the removable side of the block.
    outer: usize,
    /// Elements of the run on the far side of the block.
    inner: usize,
}

pub fn median_by_runs<T: Ord>(ledger: &mut Ledger<T>, seq: &[ElementId]) -> Result<ElementId> {
    Ok(median_by_runs_traced(ledger, seq)?.result)
}

/// Lower median in `O(log Runs)` rounds of balanced removals.
///
/// Runs shorter than `7L` (with `L = ceil(log2 n)`) are set aside. Each long
/// run offers a partitioning element from a block of length `L` with at least
/// `|R|/7` of the run below it, and symmetrically one from the top. Sorting the
/// partitioning elements by a network identifies prefixes of several runs that
/// lie below the median, and the same number of elements above it. The
/// candidates are checked exactly against the protected rank window from the
/// counts known so far, so every removed element lies outside it. The loop
/// stops once at most `64 * Runs * L` elements remain in long runs; the
/// median of those plus the set-aside runs is the answer.
pub fn median_by_runs_traced<T: Ord>(
    ledger: &mut Ledger<T>,
    seq: &[ElementId],
) -> Result<MedianRunsTrace> {
    if seq.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = seq.len();
    ledger.set_phase(PHASE_SCAN);
    let decomposition = count_runs(ledger, seq)?;
    let runs = decomposition.count();
    let block_len = (ceil_log2(n) as usize).max(1);
    let mut trace = MedianRunsTrace {
        n,
        runs,
        block_len,
        direct: false,
        steps: Vec::new(),
        short_runs: Vec::new(),
        stalled: false,
        final_set: n,
        result: seq[0],
    };
    if 8 * runs * block_len >= n {
        trace.direct = true;
        ledger.set_phase(PHASE_FINAL);
        trace.result = small_median(ledger, seq)?;
        ledger.clear_phase();
        return Ok(trace);
    }

    let window = trace.window();
    let threshold = trace.stop_threshold();
    let r0 = lower_median_rank(n);
    let mut live: Vec<LiveRun> = (0..runs)
        .map(|i| {
            let ids = decomposition.run(seq, i);
            LiveRun {
                index: i,
                ids,
                lo: 0,
                hi: ids.len(),
            }
        })
        .collect();
    let mut removed_low_total = 0;
    let mut cursors: HashMap<(usize, usize, bool), usize> = HashMap::new();
    ledger.set_phase(PHASE_PARTITION);
    loop {
        let mut kept = Vec::with_capacity(live.len());
        for run in live {
            if run.len() < 7 * block_len {
                trace.short_runs.extend_from_slice(&run.ids[run.lo..run.hi]);
            } else {
                kept.push(run);
            }
        }
        live = kept;
        let big_n: usize = live.iter().map(LiveRun::len).sum();
        if big_n <= threshold {
            break;
        }
        let total = big_n + trace.short_runs.len();
        let k = lower_median_rank(total);
        debug_assert_eq!(k + removed_low_total, r0);

        let mut pick = |run: &LiveRun, block: usize, high: bool| {
            let cursor = cursors.entry((run.index, block, high)).or_insert(0);
            let element = run.ids[block * block_len + *cursor % block_len];
            *cursor += 1;
            element
        };
        let mut lows = Vec::with_capacity(live.len());
        let mut highs = Vec::with_capacity(live.len());
        for (j, run) in live.iter().enumerate() {
            let seventh = run.len().div_ceil(7);
            let g = (run.lo + seventh).div_ceil(block_len);
            debug_assert!((g + 1) * block_len <= run.hi);
            lows.push(Partition {
                run: j,
                element: pick(run, g, false),
                outer: g * block_len - run.lo,
                inner: run.hi - (g + 1) * block_len,
            });
            let h = (run.hi - seventh) / block_len - 1;
            debug_assert!(h * block_len >= run.lo);
            highs.push(Partition {
                run: j,
                element: pick(run, h, true),
                outer: run.hi - (h + 1) * block_len,
                inner: h * block_len - run.lo,
            });
        }
        let lows = order_by_element(ledger, lows, false)?;
        let highs = order_by_element(ledger, highs, true)?;
        // low removals must stay below rank a, high removals above rank b
        let t_low = choose_t(&live, &lows, big_n, total - 1 - k + window);
        let t_high = choose_t(&live, &highs, big_n, k + window);
        let c_low: usize = lows[..t_low].iter().map(|p| p.outer).sum();
        let c_high: usize = highs[..t_high].iter().map(|p| p.outer).sum();
        let q = c_low.min(c_high);
        if q == 0 {
            trace.stalled = true;
            break;
        }
        let mut step = MedianRunsStep {
            live_before: big_n,
            pool: trace.short_runs.len(),
            t_low,
            t_high,
            removed_low: Vec::with_capacity(q),
            removed_high: Vec::with_capacity(q),
        };
        let mut left = q;
        for p in &lows[..t_low] {
            let take = p.outer.min(left);
            let run = &mut live[p.run];
            step.removed_low
                .extend_from_slice(&run.ids[run.lo..run.lo + take]);
            run.lo += take;
            left -= take;
        }
        let mut left = q;
        for p in &highs[..t_high] {
            let take = p.outer.min(left);
            let run = &mut live[p.run];
            step.removed_high
                .extend_from_slice(&run.ids[run.hi - take..run.hi]);
            run.hi -= take;
            left -= take;
        }
        removed_low_total += q;
        trace.steps.push(step);
    }

    ledger.set_phase(PHASE_FINAL);
    let mut rest: Vec<ElementId> = live
        .iter()
        .flat_map(|r| r.ids[r.lo..r.hi].iter().copied())
        .collect();
    rest.extend_from_slice(&trace.short_runs);
    trace.final_set = rest.len();
    trace.result = small_median(ledger, &rest)?;
    ledger.clear_phase();
    Ok(trace)
}

/// Sorts partitions by their element, ascending or descending.
fn order_by_element<T: Ord>(
    ledger: &mut Ledger<T>,
    parts: Vec<Partition>,
    descending: bool,
) -> Result<Vec<Partition>> {
    let ids: Vec<ElementId> = parts.iter().map(|p| p.element).collect();
    let mut sorted = network_sort(ledger, &ids)?;
    if descending {
        sorted.reverse();
    }
    let mut by_element: HashMap<ElementId, Partition> =
        parts.into_iter().map(|p| (p.element, p)).collect();
    Ok(sorted
        .iter()
        .map(|e| by_element.remove(e).unwrap())
        .collect())
}

/// Largest `t` with the first `t - 1` runs holding fewer than `N/8` elements,
/// lowered until the far sides of runs `t..` hold at least `needed` elements.
fn choose_t(live: &[LiveRun], order: &[Partition], big_n: usize, needed: usize) -> usize {
    let mut t = 0;
    let mut prefix = 0;
    for p in order {
        if 8 * prefix >= big_n {
            break;
        }
        t += 1;
        prefix += live[p.run].len();
    }
    while t > 0 {
        let far: usize = order[t - 1..].iter().map(|p| p.inner).sum();
        if far >= needed {
            break;
        }
        t -= 1;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adaptive::median_two_runs;

    /// `runs` ascending runs of a random-looking permutation of `0..n`.
    fn controlled(n: usize, runs: usize, seed: u64) -> Vec<i64> {
        let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        let mut perm: Vec<i64> = (0..n as i64).collect();
        for i in (1..n).rev() {
            perm.swap(i, (next() % (i as u64 + 1)) as usize);
        }
        let mut out = Vec::with_capacity(n);
        let len = n / runs;
        for r in 0..runs {
            let end = if r + 1 == runs { n } else { (r + 1) * len };
            let mut chunk = perm[r * len..end].to_vec();
            chunk.sort();
            out.extend(chunk);
        }
        out
    }

    fn audit(values: &[i64]) -> MedianRunsTrace {
        let (mut l, ids) = Ledger::new(values.to_vec()).unwrap();
        let trace = median_by_runs_traced(&mut l, &ids).unwrap();
        let sorted = l.audit_sorted(&ids).unwrap();
        let rank: HashMap<ElementId, usize> =
            sorted.iter().enumerate().map(|(r, &id)| (id, r)).collect();
        assert_eq!(trace.result, sorted[lower_median_rank(ids.len())]);
        let (a, b) = trace.rank_window();
        for step in &trace.steps {
            assert_eq!(step.removed_low.len(), step.removed_high.len());
            assert!(step.removed_low.iter().all(|id| rank[id] < a));
            assert!(step.removed_high.iter().all(|id| rank[id] > b));
            assert!(28 * step.live_after() <= 27 * step.live_before);
        }
        assert!(trace.short_runs.len() <= 7 * trace.runs * trace.block_len);
        trace
    }

    #[test]
    fn sorted_input_returns_middle() {
        let values: Vec<i64> = (0..1001).collect();
        let (mut l, ids) = Ledger::new(values).unwrap();
        assert_eq!(median_by_runs(&mut l, &ids).unwrap(), ids[500]);
    }

    #[test]
    fn small_and_degenerate() {
        let (mut l, ids) = Ledger::new(vec![5]).unwrap();
        assert_eq!(median_by_runs(&mut l, &ids).unwrap(), ids[0]);
        assert_eq!(l.total(), 0);
        let (mut l, ids) = Ledger::new(vec![3, 1, 2]).unwrap();
        assert_eq!(median_by_runs(&mut l, &ids).unwrap(), ids[2]);
        assert_eq!(median_by_runs(&mut l, &[]), Err(Error::EmptyInput));
    }

    #[test]
    fn removal_steps_happen_and_are_safe() {
        for runs in [1, 2, 4, 16] {
            for seed in 0..4 {
                let trace = audit(&controlled(1 << 15, runs, seed));
                assert!(!trace.direct);
                assert!(!trace.steps.is_empty(), "runs={runs}");
            }
        }
    }

    #[test]
    fn agrees_with_two_run_median() {
        for seed in 0..6 {
            let values = controlled(5000, 2, seed);
            let (mut l, ids) = Ledger::new(values).unwrap();
            let rd = count_runs(&mut l, &ids).unwrap();
            let expect =
                median_two_runs(&mut l, rd.run(&ids, 0), rd.run(&ids, rd.count() - 1)).unwrap();
            let (mut l2, _) = Ledger::new(controlled(5000, 2, seed)).unwrap();
            assert_eq!(median_by_runs(&mut l2, &ids).unwrap(), expect);
        }
    }

    #[test]
    fn many_short_runs_go_direct() {
        let trace = audit(&controlled(2000, 200, 3));
        assert!(trace.direct);
    }
}

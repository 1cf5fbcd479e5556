//! Predecessor search in a sorted array.
//!
//! * [`exp_search`]: doubling probes from the front, query fragility
//!   logarithmic in the rank of the answer.
//! * [`OffsetSearchStructure`]: deterministic, spreads comparisons over the
//!   array across a sequence of searches.
//! * [`randomized_search`]: binary search with a random pivot from the middle
//!   half of the live range.

mod offset;

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ledger::{ElementId, Ledger};

pub use offset::{OffsetSearchStructure, OffsetStep, PotentialAudit};

/// Amortized-cost constant of the offset search analysis.
pub const AMORTIZED_CONSTANT: f64 = 112.0;

/// Element ids in ascending payload order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SortedView {
    ids: Vec<ElementId>,
}

impl SortedView {
    /// Wraps ids the caller asserts are ascending; see [`SortedView::audit`].
    pub fn new(ids: Vec<ElementId>) -> Self {
        SortedView { ids }
    }

    pub fn ids(&self) -> &[ElementId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn positions(&self) -> HashMap<ElementId, usize> {
        self.ids
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i))
            .collect()
    }

    /// Checks ascending order with audit comparisons.
    pub fn audit<T: Ord>(&self, ledger: &Ledger<T>) -> Result<bool> {
        for w in self.ids.windows(2) {
            if ledger.audit_compare(w[0], w[1])?.is_gt() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Index of the largest element strictly smaller than the query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PredecessorResult {
    pub index: Option<usize>,
}

impl PredecessorResult {
    /// Result for a query whose first not-smaller element sits at `gap`.
    pub fn from_gap(gap: usize) -> Self {
        PredecessorResult {
            index: gap.checked_sub(1),
        }
    }

    /// Position of the first element not smaller than the query.
    pub fn gap(self) -> usize {
        self.index.map_or(0, |i| i + 1)
    }

    /// Rank of the query: 1 + predecessor index, 0 when absent.
    pub fn rank(self) -> usize {
        self.gap()
    }
}

/// Exponential search from the front of the array.
///
/// Probes positions 0, 1, 3, 7, ..., `2^j - 1` (capped at `n - 1`) until an
/// element not smaller than the query shows up, then binary searches the gap
/// between the last two probes.
pub fn exp_search<T: Ord>(
    ledger: &mut Ledger<T>,
    view: &SortedView,
    query: ElementId,
) -> Result<PredecessorResult> {
    let ids = view.ids();
    let n = ids.len();
    if n == 0 {
        return Ok(PredecessorResult::from_gap(0));
    }
    // ids[..below] are known smaller, ids[above..] known not smaller
    let mut below = 0usize;
    let mut above = n;
    let mut probe = 0usize;
    loop {
        let p = probe.min(n - 1);
        if ledger.compare(ids[p], query)?.is_lt() {
            below = p + 1;
            if p == n - 1 {
                break;
            }
        } else {
            above = p;
            break;
        }
        probe = 2 * probe + 1;
    }
    while below < above {
        let mid = below + (above - below) / 2;
        if ledger.compare(ids[mid], query)?.is_lt() {
            below = mid + 1;
        } else {
            above = mid;
        }
    }
    Ok(PredecessorResult::from_gap(below))
}

/// Query-fragility bound for [`exp_search`] at query rank `k`.
pub fn exp_search_bound(rank: usize) -> u64 {
    2 * (u64::from((rank as u64 + 2).ilog2()) + 2)
}

/// Binary search whose pivot is drawn uniformly from positions
/// `[floor(len/4), ceil(3*len/4))` of the live range.
pub fn randomized_search<T: Ord, R: Rng + ?Sized>(
    ledger: &mut Ledger<T>,
    view: &SortedView,
    query: ElementId,
    rng: &mut R,
) -> Result<PredecessorResult> {
    let ids = view.ids();
    let (mut lo, mut hi) = (0usize, ids.len());
    while lo < hi {
        let len = hi - lo;
        let from = lo + len / 4;
        let to = lo + (3 * len).div_ceil(4);
        let p = rng.random_range(from..to);
        if ledger.compare(ids[p], query)?.is_lt() {
            lo = p + 1;
        } else {
            hi = p;
        }
    }
    Ok(PredecessorResult::from_gap(lo))
}

/// Number of array elements between a query's gap and position `y`,
/// inclusive of `y`; never less than 1.
pub fn distance(result: PredecessorResult, y: usize) -> usize {
    let gap = result.gap();
    if y >= gap {
        y - gap + 1
    } else {
        gap - y
    }
}

/// One search of a [`SearchTrace`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    /// Element index of the query.
    pub query: usize,
    pub result: PredecessorResult,
    /// Array positions the query was compared against, in order.
    pub compared: Vec<usize>,
}

/// Log of a sequence of searches against one array.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub n: usize,
    pub records: Vec<SearchRecord>,
}

/// Outcome of checking one element against the amortized budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmortizedVerdict {
    pub y: usize,
    pub count: u64,
    pub budget: f64,
    pub slack: f64,
    pub pass: bool,
}

impl SearchTrace {
    pub fn new(n: usize) -> Self {
        SearchTrace {
            n,
            records: Vec::new(),
        }
    }

    /// Runs `search` with ledger recording on and appends its record.
    pub fn record<T, F>(
        &mut self,
        ledger: &mut Ledger<T>,
        positions: &HashMap<ElementId, usize>,
        query: ElementId,
        search: F,
    ) -> Result<PredecessorResult>
    where
        F: FnOnce(&mut Ledger<T>) -> Result<PredecessorResult>,
    {
        ledger.start_recording();
        let outcome = search(ledger);
        let pairs = ledger.stop_recording();
        let result = outcome?;
        let compared = pairs
            .into_iter()
            .filter_map(|(a, b)| {
                let other = if a == query { b } else { a };
                positions.get(&other).copied()
            })
            .collect();
        self.records.push(SearchRecord {
            query: query.index(),
            result,
            compared,
        });
        Ok(result)
    }

    /// Per-position comparison counts over the whole trace.
    pub fn counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n];
        for r in &self.records {
            for &p in &r.compared {
                counts[p] += 1;
            }
        }
        counts
    }

    pub fn n_padded(&self) -> usize {
        self.n.max(1).next_power_of_two()
    }

    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_json_lines(n: usize, text: &str) -> serde_json::Result<Self> {
        let records = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<serde_json::Result<_>>()?;
        Ok(SearchTrace { n, records })
    }
}

/// Checks `count(y) <= log2(n_padded) + sum_i 112 / d(x_i, y)`.
pub fn amortized_check(trace: &SearchTrace, y: usize) -> AmortizedVerdict {
    let count = trace
        .records
        .iter()
        .map(|r| r.compared.iter().filter(|&&p| p == y).count() as u64)
        .sum();
    amortized_verdict(trace, y, count)
}

/// [`amortized_check`] for every position, sharing one counting pass.
pub fn amortized_check_all(trace: &SearchTrace) -> Vec<AmortizedVerdict> {
    let counts = trace.counts();
    (0..trace.n)
        .map(|y| amortized_verdict(trace, y, counts[y]))
        .collect()
}

fn amortized_verdict(trace: &SearchTrace, y: usize, count: u64) -> AmortizedVerdict {
    let base = f64::from(trace.n_padded().trailing_zeros());
    let budget = base
        + trace
            .records
            .iter()
            .map(|r| AMORTIZED_CONSTANT / distance(r.result, y) as f64)
            .sum::<f64>();
    let slack = budget - count as f64;
    AmortizedVerdict {
        y,
        count,
        budget,
        slack,
        pass: slack >= 0.0,
    }
}

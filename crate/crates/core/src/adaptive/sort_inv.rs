use serde::{Deserialize, Serialize};

use super::inv::extract_sorted_run;
use crate::error::Result;
use crate::ledger::{ElementId, Ledger};
use crate::primitives::{exponential_merge, network_sort};

pub const PHASE_EXTRACT: &str = "inv-extract";
pub const PHASE_SEARCH: &str = "inv-search";
pub const PHASE_MERGE: &str = "inv-merge";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortInvTrace {
    pub sorted: Vec<ElementId>,
    /// `R`, the ascending subsequence left by the extraction.
    pub run: Vec<ElementId>,
    /// `I`, ordered by input position; element `i` searched column `i`.
    pub removed: Vec<ElementId>,
    /// Block length, equal to `|I|`.
    pub block_size: usize,
    /// Blocks travelled by each search from its origin block.
    pub search_distances: Vec<usize>,
}

pub fn sort_by_inv<T: Ord>(ledger: &mut Ledger<T>, seq: &[ElementId]) -> Result<Vec<ElementId>> {
    Ok(sort_by_inv_traced(ledger, seq)?.sorted)
}

/// Column `i` of `R` cut into blocks of `b`: the `i`-th element of each block.
struct Column<'a> {
    run: &'a [ElementId],
    b: usize,
    i: usize,
}

impl Column<'_> {
    fn len(&self) -> usize {
        if self.i >= self.run.len() {
            0
        } else {
            (self.run.len() - self.i).div_ceil(self.b)
        }
    }

    fn get(&self, beta: usize) -> ElementId {
        self.run[beta * self.b + self.i]
    }
}

/// Number of column elements below `e`, searching outward from `origin` with
/// doubling steps in the direction the first comparison points to.
fn column_search<T: Ord>(
    ledger: &mut Ledger<T>,
    col: &Column,
    origin: usize,
    e: ElementId,
) -> Result<usize> {
    let len = col.len();
    if len == 0 {
        return Ok(0);
    }
    let (mut lo, mut hi);
    if ledger.less(col.get(origin), e)? {
        lo = origin + 1;
        hi = len;
        let mut d = 1;
        while origin + d < len {
            if ledger.less(col.get(origin + d), e)? {
                lo = origin + d + 1;
                d *= 2;
            } else {
                hi = origin + d;
                break;
            }
        }
    } else {
        lo = 0;
        hi = origin;
        let mut d = 1;
        while d <= origin {
            if ledger.less(col.get(origin - d), e)? {
                lo = origin - d + 1;
                break;
            }
            hi = origin - d;
            d *= 2;
        }
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if ledger.less(col.get(mid), e)? {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Sorting in `O(log Inv)` fragility up to the network-sort substitute.
///
/// After splitting off `R` and `I`, `R` is cut into blocks of `|I|` elements
/// and the `i`-th element of `I` locates itself among the `i`-th elements of
/// all blocks, starting from the block its input position falls in. That pins
/// it to a window of `|I|` slots spanning at most two blocks. Blocks are then
/// processed left to right: associated elements are sorted and merged in, and
/// those beyond the block's last element carry over to the next block.
pub fn sort_by_inv_traced<T: Ord>(
    ledger: &mut Ledger<T>,
    seq: &[ElementId],
) -> Result<SortInvTrace> {
    ledger.set_phase(PHASE_EXTRACT);
    let ex = extract_sorted_run(ledger, seq)?;
    let mut order: Vec<usize> = (0..ex.removed.len()).collect();
    order.sort_by_key(|&j| ex.removed_positions[j]);
    let removed: Vec<ElementId> = order.iter().map(|&j| ex.removed[j]).collect();
    let removed_positions: Vec<usize> = order.iter().map(|&j| ex.removed_positions[j]).collect();
    let run = ex.run;
    let b = removed.len();
    let mut trace = SortInvTrace {
        sorted: Vec::with_capacity(seq.len()),
        run: run.clone(),
        removed: removed.clone(),
        block_size: b,
        search_distances: Vec::with_capacity(b),
    };
    if b == 0 {
        trace.sorted = run;
        ledger.clear_phase();
        return Ok(trace);
    }
    if run.is_empty() {
        ledger.set_phase(PHASE_MERGE);
        trace.sorted = network_sort(ledger, &removed)?;
        ledger.clear_phase();
        return Ok(trace);
    }

    ledger.set_phase(PHASE_SEARCH);
    let blocks = run.len().div_ceil(b);
    let mut assigned: Vec<Vec<ElementId>> = vec![Vec::new(); blocks];
    for (i, (&e, &pos)) in removed.iter().zip(&removed_positions).enumerate() {
        let col = Column { run: &run, b, i };
        let preceding = ex.run_positions.partition_point(|&p| p < pos);
        let origin = (preceding / b).min(col.len().saturating_sub(1));
        let g = column_search(ledger, &col, origin, e)?;
        trace.search_distances.push(g.abs_diff(origin));
        // e lies above col[g - 1] and below col[g]
        let first_slot = if g == 0 { 0 } else { (g - 1) * b + i + 1 };
        assigned[(first_slot / b).min(blocks - 1)].push(e);
    }

    ledger.set_phase(PHASE_MERGE);
    let mut pending: Vec<ElementId> = Vec::new();
    for (beta, own) in assigned.into_iter().enumerate() {
        let block = &run[beta * b..((beta + 1) * b).min(run.len())];
        pending.extend(own);
        if pending.is_empty() {
            trace.sorted.extend_from_slice(block);
            continue;
        }
        let cand = network_sort(ledger, &pending)?;
        let merged = exponential_merge(ledger, block, &cand)?;
        if beta + 1 == blocks {
            trace.sorted.extend(merged);
            pending = Vec::new();
        } else {
            let last = *block.last().unwrap();
            let cut = merged.iter().position(|&x| x == last).unwrap() + 1;
            trace.sorted.extend_from_slice(&merged[..cut]);
            pending = merged[cut..].to_vec();
        }
    }
    ledger.clear_phase();
    Ok(trace)
}

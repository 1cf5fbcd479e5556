//! Predecessor search that spreads comparisons over the array.
//!
//! Every dyadic aligned interval `[k * 2^i, (k + 1) * 2^i)` carries a rotating
//! offset. A search step picks the largest rank `i` with at least three rank-`i`
//! intervals fully inside the live range, takes a non-extreme one of them,
//! compares the query against the element under its offset and advances the
//! offset. Far-away elements are therefore touched only once every `2^i` visits.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{PredecessorResult, SortedView};
use crate::error::{Error, Result};
use crate::ledger::{ElementId, Ledger};

/// Sorted array plus one offset per materialized aligned interval.
#[derive(Debug, Clone)]
pub struct OffsetSearchStructure {
    view: SortedView,
    positions: HashMap<ElementId, usize>,
    /// `offsets[i][k]` for every rank-`i` block intersecting `[0, n)`.
    offsets: Vec<Vec<u32>>,
    levels: u32,
}

/// One recursion of an offset search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OffsetStep {
    /// Live half-open index range before the comparison.
    pub range: (usize, usize),
    /// `None` for the linear base case.
    pub rank: Option<u32>,
    pub block: usize,
    pub first_block: usize,
    pub last_block: usize,
    pub probe: usize,
}

/// Potential of one array element with respect to the current offsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialAudit {
    pub y: ElementId,
    pub position: usize,
    /// `(rank, t)` where `t` is how many increments the offset of the rank-`i`
    /// interval containing `y` needs before it points at `y`.
    pub per_rank: Vec<(u32, u64)>,
    pub phi: f64,
}

impl OffsetSearchStructure {
    pub fn build(view: SortedView) -> Self {
        let n = view.len();
        let levels = n.max(1).next_power_of_two().trailing_zeros();
        let offsets = (0..=levels)
            .map(|i| vec![0u32; n.div_ceil(1 << i)])
            .collect();
        let positions = view.positions();
        OffsetSearchStructure {
            view,
            positions,
            offsets,
            levels,
        }
    }

    pub fn view(&self) -> &SortedView {
        &self.view
    }

    pub fn len(&self) -> usize {
        self.view.len()
    }

    pub fn is_empty(&self) -> bool {
        self.view.is_empty()
    }

    pub fn n_padded(&self) -> usize {
        1 << self.levels
    }

    /// `log2(n_padded)`, the highest materialized rank.
    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn offset(&self, rank: u32, block: usize) -> Option<u32> {
        self.offsets.get(rank as usize)?.get(block).copied()
    }

    pub fn slot_count(&self) -> usize {
        self.offsets.iter().map(Vec::len).sum()
    }

    pub fn position(&self, id: ElementId) -> Option<usize> {
        self.positions.get(&id).copied()
    }

    pub fn positions(&self) -> &HashMap<ElementId, usize> {
        &self.positions
    }

    /// Computes the potential of `y` from the offsets alone (no comparisons).
    ///
    /// Rank 0 is left out: its interval is a single element whose offset never
    /// moves, so its term is the constant 1.
    pub fn potential_audit(&self, y: ElementId) -> Result<PotentialAudit> {
        let position = self.position(y).ok_or(Error::UnknownElement(y))?;
        let mut per_rank = Vec::with_capacity(self.levels as usize);
        let mut phi = 0.0;
        for rank in 1..=self.levels {
            let size = 1u64 << rank;
            let block = position >> rank;
            let within = (position - (block << rank)) as u64;
            let offset = u64::from(self.offsets[rank as usize][block]);
            let t = (within + size - offset) % size;
            per_rank.push((rank, t));
            phi += (size - t) as f64 / size as f64;
        }
        Ok(PotentialAudit {
            y,
            position,
            per_rank,
            phi,
        })
    }

    pub fn search<T: Ord>(
        &mut self,
        ledger: &mut Ledger<T>,
        query: ElementId,
    ) -> Result<PredecessorResult> {
        self.search_inner(ledger, query, None)
    }

    pub fn search_traced<T: Ord>(
        &mut self,
        ledger: &mut Ledger<T>,
        query: ElementId,
    ) -> Result<(PredecessorResult, Vec<OffsetStep>)> {
        let mut steps = Vec::new();
        let res = self.search_inner(ledger, query, Some(&mut steps))?;
        Ok((res, steps))
    }

    fn search_inner<T: Ord>(
        &mut self,
        ledger: &mut Ledger<T>,
        query: ElementId,
        mut steps: Option<&mut Vec<OffsetStep>>,
    ) -> Result<PredecessorResult> {
        let ids = self.view.ids();
        let (mut lo, mut hi) = (0usize, ids.len());
        while lo < hi {
            let chosen = widest_rank(lo, hi);
            let (probe, step) = match chosen {
                Some((rank, first, last)) => {
                    let block = first + (last - first) / 2;
                    let slot = &mut self.offsets[rank as usize][block];
                    let probe = (block << rank) + *slot as usize;
                    *slot = ((*slot as u64 + 1) % (1u64 << rank)) as u32;
                    let step = OffsetStep {
                        range: (lo, hi),
                        rank: Some(rank),
                        block,
                        first_block: first,
                        last_block: last,
                        probe,
                    };
                    (probe, step)
                }
                None => {
                    let step = OffsetStep {
                        range: (lo, hi),
                        rank: None,
                        block: lo,
                        first_block: lo,
                        last_block: lo,
                        probe: lo,
                    };
                    (lo, step)
                }
            };
            if let Some(s) = steps.as_deref_mut() {
                s.push(step);
            }
            if ledger.compare(ids[probe], query)?.is_lt() {
                lo = probe + 1;
            } else {
                hi = probe;
            }
        }
        Ok(PredecessorResult::from_gap(lo))
    }
}

/// Largest rank with at least three aligned intervals fully inside `[lo, hi)`,
/// with the first and last such block indices.
fn widest_rank(lo: usize, hi: usize) -> Option<(u32, usize, usize)> {
    let len = hi - lo;
    if len < 3 {
        return None;
    }
    let mut rank = (len / 3).ilog2();
    loop {
        let first = lo.div_ceil(1 << rank);
        let end = hi >> rank;
        if end >= first + 3 {
            return Some((rank, first, end - 1));
        }
        if rank == 0 {
            return None;
        }
        rank -= 1;
    }
}

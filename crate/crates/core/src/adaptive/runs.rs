use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::{ElementId, Ledger};
use crate::primitives::tournament_min;

/// Maximal ascending runs of a sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunDecomposition {
    /// `(start, length)` in sequence positions.
    pub runs: Vec<(usize, usize)>,
    /// First (smallest) element of each run.
    pub heads: Vec<ElementId>,
}

impl RunDecomposition {
    /// The measure `Runs`, at least 1 for non-empty input.
    pub fn count(&self) -> usize {
        self.runs.len()
    }

    pub fn run<'a>(&self, seq: &'a [ElementId], i: usize) -> &'a [ElementId] {
        let (start, len) = self.runs[i];
        &seq[start..start + len]
    }
}

fn decompose(
    seq: &[ElementId],
    mut descends: impl FnMut(usize) -> Result<bool>,
) -> Result<RunDecomposition> {
    if seq.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..seq.len() {
        if descends(i)? {
            runs.push((start, i - start));
            start = i;
        }
    }
    runs.push((start, seq.len() - start));
    let heads = runs.iter().map(|&(s, _)| seq[s]).collect();
    Ok(RunDecomposition { runs, heads })
}

/// One counted comparison per adjacent pair.
pub fn count_runs<T: Ord>(ledger: &mut Ledger<T>, seq: &[ElementId]) -> Result<RunDecomposition> {
    decompose(seq, |i| ledger.less(seq[i], seq[i - 1]))
}

/// [`count_runs`] with audit comparisons only.
pub fn runs_oracle<T: Ord>(ledger: &Ledger<T>, seq: &[ElementId]) -> Result<RunDecomposition> {
    decompose(seq, |i| {
        Ok(ledger.audit_compare_strict(seq[i], seq[i - 1])? == Ordering::Less)
    })
}

/// Exact inversion count under the strict order, by merge counting with audit
/// comparisons.
pub fn count_inversions_oracle<T: Ord>(ledger: &Ledger<T>, seq: &[ElementId]) -> Result<u64> {
    let mut buf = seq.to_vec();
    let mut scratch = Vec::with_capacity(seq.len());
    sort_count(ledger, &mut buf, &mut scratch)
}

fn sort_count<T: Ord>(
    ledger: &Ledger<T>,
    xs: &mut [ElementId],
    scratch: &mut Vec<ElementId>,
) -> Result<u64> {
    if xs.len() < 2 {
        return Ok(0);
    }
    let mid = xs.len() / 2;
    let mut inv =
        sort_count(ledger, &mut xs[..mid], scratch)? + sort_count(ledger, &mut xs[mid..], scratch)?;
    scratch.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < xs.len() {
        if ledger.audit_compare_strict(xs[j], xs[i])? == Ordering::Less {
            inv += (mid - i) as u64;
            scratch.push(xs[j]);
            j += 1;
        } else {
            scratch.push(xs[i]);
            i += 1;
        }
    }
    scratch.extend_from_slice(&xs[i..mid]);
    scratch.extend_from_slice(&xs[j..]);
    xs.copy_from_slice(scratch);
    Ok(inv)
}

/// Minimum by a scan for run heads and a tournament over them.
///
/// Every element takes part in at most `2 + ceil(log2 Runs)` comparisons.
pub fn min_by_runs<T: Ord>(ledger: &mut Ledger<T>, seq: &[ElementId]) -> Result<ElementId> {
    let runs = count_runs(ledger, seq)?;
    tournament_min(ledger, &runs.heads)
}

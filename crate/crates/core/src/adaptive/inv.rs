use serde::{Deserialize, Serialize};

use super::two_runs::median_two_runs;
use crate::error::{Error, Result};
use crate::ledger::{ElementId, Ledger};
use crate::primitives::{network_sort, tournament_min};

/// Split of a sequence into an ascending subsequence `R` and the rest `I`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InversionExtract {
    /// `R`, ascending and in input order.
    pub run: Vec<ElementId>,
    /// Input position of each element of `run`.
    pub run_positions: Vec<usize>,
    /// `I`, in the order elements were removed.
    pub removed: Vec<ElementId>,
    pub removed_positions: Vec<usize>,
    /// Marks placed during the scan, including those moved down the stack.
    pub marks_used: usize,
}

/// Scans `seq` keeping `R` as a stack whose slots carry 0 or 1 marks.
///
/// A scanned element smaller than the top goes to `I` and marks the top. A
/// slot reaching two marks is popped into `I` and passes one mark down.
/// Every element takes part in at most 4 comparisons.
pub fn extract_sorted_run<T: Ord>(
    ledger: &mut Ledger<T>,
    seq: &[ElementId],
) -> Result<InversionExtract> {
    if seq.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut stack: Vec<(ElementId, usize, u8)> = Vec::new();
    let mut removed = Vec::new();
    let mut removed_positions = Vec::new();
    let mut marks_used = 0;
    for (pos, &e) in seq.iter().enumerate() {
        let Some(&(top, _, _)) = stack.last() else {
            stack.push((e, pos, 0));
            continue;
        };
        if ledger.less(top, e)? {
            stack.push((e, pos, 0));
            continue;
        }
        removed.push(e);
        removed_positions.push(pos);
        marks_used += 1;
        stack.last_mut().unwrap().2 += 1;
        while let Some(&(f, fpos, 2)) = stack.last() {
            stack.pop();
            removed.push(f);
            removed_positions.push(fpos);
            match stack.last_mut() {
                Some(below) => {
                    below.2 += 1;
                    marks_used += 1;
                }
                None => break,
            }
        }
    }
    Ok(InversionExtract {
        run: stack.iter().map(|s| s.0).collect(),
        run_positions: stack.iter().map(|s| s.1).collect(),
        removed,
        removed_positions,
        marks_used,
    })
}

/// Minimum via a tournament over `I` and one comparison with the head of `R`.
pub fn min_by_inv<T: Ord>(ledger: &mut Ledger<T>, seq: &[ElementId]) -> Result<ElementId> {
    let ex = extract_sorted_run(ledger, seq)?;
    let head = ex.run.first().copied();
    if ex.removed.is_empty() {
        return Ok(head.expect("R is non-empty when I is empty"));
    }
    let m = tournament_min(ledger, &ex.removed)?;
    match head {
        Some(h) if ledger.less(h, m)? => Ok(h),
        _ => Ok(m),
    }
}

/// Lower median via `R`, a network sort of `I`, and the two-run median.
pub fn median_by_inv<T: Ord>(ledger: &mut Ledger<T>, seq: &[ElementId]) -> Result<ElementId> {
    let ex = extract_sorted_run(ledger, seq)?;
    let sorted = network_sort(ledger, &ex.removed)?;
    median_two_runs(ledger, &ex.run, &sorted)
}

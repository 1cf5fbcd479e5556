use crate::error::{Error, Result};
use crate::ledger::{ElementId, Ledger};

/// Number of elements of `list[start..]` that precede `key`, found by probing
/// offsets 0, 1, 3, 7, ... and then binary searching the bracketed gap.
pub(crate) fn gallop<T: Ord>(
    ledger: &mut Ledger<T>,
    key: ElementId,
    list: &[ElementId],
    start: usize,
) -> Result<usize> {
    let len = list.len() - start;
    if len == 0 {
        return Ok(0);
    }
    let mut below = 0;
    let mut above = len;
    let mut offset = 0usize;
    loop {
        let probe = offset.min(len - 1);
        if ledger.less(list[start + probe], key)? {
            below = probe + 1;
            if probe == len - 1 {
                break;
            }
        } else {
            above = probe;
            break;
        }
        offset = 2 * offset + 1;
    }
    while below < above {
        let mid = below + (above - below) / 2;
        if ledger.less(list[start + mid], key)? {
            below = mid + 1;
        } else {
            above = mid;
        }
    }
    Ok(below)
}

/// Merges two ascending lists by alternating galloping searches.
///
/// The head of one list searches the other from the current frontier, the
/// elements it passes are emitted followed by the searcher, and the roles swap.
pub fn exponential_merge<T: Ord>(
    ledger: &mut Ledger<T>,
    a: &[ElementId],
    b: &[ElementId],
) -> Result<Vec<ElementId>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut b_searches = true;
    while i < a.len() && j < b.len() {
        if b_searches {
            let c = gallop(ledger, b[j], a, i)?;
            out.extend_from_slice(&a[i..i + c]);
            i += c;
            out.push(b[j]);
            j += 1;
        } else {
            let c = gallop(ledger, a[i], b, j)?;
            out.extend_from_slice(&b[j..j + c]);
            j += c;
            out.push(a[i]);
            i += 1;
        }
        b_searches = !b_searches;
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Ok(out)
}

/// [`exponential_merge`] preceded by an audit-mode check that both inputs are
/// ascending.
pub fn exponential_merge_checked<T: Ord>(
    ledger: &mut Ledger<T>,
    a: &[ElementId],
    b: &[ElementId],
) -> Result<Vec<ElementId>> {
    for list in [a, b] {
        for (pos, w) in list.windows(2).enumerate() {
            if ledger.audit_compare_strict(w[0], w[1])?.is_gt() {
                return Err(Error::MergePreconditionViolated { position: pos + 1 });
            }
        }
    }
    exponential_merge(ledger, a, b)
}

use crate::error::{Error, Result};
use crate::ledger::{ElementId, Ledger};
use crate::primitives::network::network_sort;

const GROUP: usize = 5;
/// Inputs up to this size are network-sorted outright.
pub(crate) const CUTOFF: usize = 10;

/// Deterministic median-of-medians selection of the rank-`k` element
/// (0-based, strict order).
///
/// Total comparisons are linear in `ids.len()`. The pivot of each partition
/// step is compared against every other live element, so a pivot's own count
/// grows linearly with the partition size.
pub fn mom_select<T: Ord>(
    ledger: &mut Ledger<T>,
    ids: &[ElementId],
    k: usize,
) -> Result<ElementId> {
    if k >= ids.len() {
        return Err(Error::RankOutOfRange { k, len: ids.len() });
    }
    let mut live = ids.to_vec();
    let mut k = k;
    loop {
        if live.len() <= CUTOFF {
            return Ok(network_sort(ledger, &live)?[k]);
        }
        let mut medians = Vec::with_capacity(live.len().div_ceil(GROUP));
        for group in live.chunks(GROUP) {
            let sorted = network_sort(ledger, group)?;
            medians.push(sorted[(sorted.len() - 1) / 2]);
        }
        let pivot = mom_select(ledger, &medians, (medians.len() - 1) / 2)?;
        let mut below = Vec::new();
        let mut above = Vec::new();
        for &x in &live {
            if x == pivot {
                continue;
            }
            if ledger.less(x, pivot)? {
                below.push(x);
            } else {
                above.push(x);
            }
        }
        match k.cmp(&below.len()) {
            std::cmp::Ordering::Less => live = below,
            std::cmp::Ordering::Equal => return Ok(pivot),
            std::cmp::Ordering::Greater => {
                k -= below.len() + 1;
                live = above;
            }
        }
    }
}

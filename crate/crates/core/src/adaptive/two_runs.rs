use crate::error::{Error, Result};
use crate::ledger::{ElementId, Ledger};
use crate::primitives::network_sort;

/// Lower median of the union of two ascending runs.
///
/// Each step compares the middle `x` of the shorter live window with the
/// element `y` of the longer one that would complete the median rank, then
/// drops the same number of elements below and above the median. Both windows
/// lose elements every step, so neither `x` nor `y` repeats for long. Once the
/// shorter window has at most 2 elements, the answer lies among it and at most
/// 3 central elements of the longer one, which are network-sorted.
pub fn median_two_runs<T: Ord>(
    ledger: &mut Ledger<T>,
    run1: &[ElementId],
    run2: &[ElementId],
) -> Result<ElementId> {
    let (a, b) = if run1.len() <= run2.len() {
        (run1, run2)
    } else {
        (run2, run1)
    };
    if b.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (mut alo, mut ahi) = (0, a.len());
    let (mut blo, mut bhi) = (0, b.len());
    // k stays the lower-median rank of the live union
    let mut k = (a.len() + b.len() - 1) / 2;
    while ahi - alo > 2 {
        let s1 = ahi - alo;
        let m1 = s1 / 2;
        let j = k - m1;
        let x = a[alo + m1];
        let y = b[blo + j];
        if ledger.less(x, y)? {
            alo += m1;
            bhi -= m1;
            k -= m1;
        } else {
            let c = (s1 - m1).min(j);
            ahi -= c;
            blo += c;
            k -= c;
        }
    }
    let s1 = ahi - alo;
    let lo = k.saturating_sub(s1);
    let hi = k.min(bhi - blo - 1);
    let mut candidates: Vec<ElementId> = a[alo..ahi].to_vec();
    candidates.extend_from_slice(&b[blo + lo..=blo + hi]);
    if candidates.len() == 1 {
        return Ok(candidates[0]);
    }
    Ok(network_sort(ledger, &candidates)?[k - lo])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(
        values: &[i64],
        mask: impl Fn(usize) -> bool,
    ) -> (Ledger<i64>, Vec<ElementId>, Vec<ElementId>, Vec<ElementId>) {
        let (l, ids) = Ledger::new(values.to_vec()).unwrap();
        let sorted = l.audit_sorted(&ids).unwrap();
        let (r1, r2): (Vec<_>, Vec<_>) = sorted.iter().enumerate().partition(|(i, _)| mask(*i));
        let r1 = r1.into_iter().map(|p| *p.1).collect();
        let r2 = r2.into_iter().map(|p| *p.1).collect();
        (l, ids, r1, r2)
    }

    #[test]
    fn examples() {
        let (mut l, ids) = Ledger::new(vec![1, 2, 3]).unwrap();
        assert_eq!(median_two_runs(&mut l, &[], &ids).unwrap(), ids[1]);
        assert_eq!(l.total(), 0);
        let (mut l, ids) = Ledger::new(vec![1, 2]).unwrap();
        assert_eq!(
            median_two_runs(&mut l, &ids[..1], &ids[1..]).unwrap(),
            ids[0]
        );
        assert_eq!(
            median_two_runs(&mut l, &ids[1..], &ids[..1]).unwrap(),
            ids[0]
        );
        assert_eq!(median_two_runs(&mut l, &[], &[]), Err(Error::EmptyInput));
    }

    #[test]
    fn all_small_splits() {
        for n in 1..=12usize {
            let values: Vec<i64> = (0..n as i64).collect();
            for mask in 0..(1u32 << n) {
                let (mut l, ids, r1, r2) = split(&values, |i| mask >> i & 1 == 1);
                let got = median_two_runs(&mut l, &r1, &r2).unwrap();
                assert_eq!(got, ids[(n - 1) / 2], "n={n} mask={mask:b}");
            }
        }
    }

    #[test]
    fn large_splits_have_constant_fragility() {
        let n = 10_000usize;
        let values: Vec<i64> = (0..n as i64).collect();
        let mut worst = 0;
        for seed in 0..30u64 {
            let threshold = (seed * 0x2545_F491) % 1000;
            let (mut l, ids, r1, r2) = split(&values, |i| {
                ((i as u64).wrapping_mul(0x9E37_79B9) ^ seed) % 1000 < threshold.max(1)
            });
            assert_eq!(median_two_runs(&mut l, &r1, &r2).unwrap(), ids[(n - 1) / 2]);
            worst = worst.max(*l.counts().iter().max().unwrap());
        }
        assert!(worst <= 12, "worst {worst}");
    }
}

use crate::error::{Error, Result};
use crate::ledger::{ElementId, Ledger};

/// Knockout tournament; each participant plays at most `ceil(log2 m)` rounds.
pub fn tournament_min<T: Ord>(ledger: &mut Ledger<T>, ids: &[ElementId]) -> Result<ElementId> {
    if ids.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut round = ids.to_vec();
    while round.len() > 1 {
        let mut next = Vec::with_capacity(round.len().div_ceil(2));
        for pair in round.chunks(2) {
            match *pair {
                [a, b] => next.push(if ledger.less(a, b)? { a } else { b }),
                [bye] => next.push(bye),
                _ => unreachable!(),
            }
        }
        round = next;
    }
    Ok(round[0])
}

pub(crate) fn ceil_log2(m: usize) -> u32 {
    if m <= 1 {
        0
    } else {
        usize::BITS - (m - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_and_pair() {
        let (mut l, ids) = Ledger::new(vec![4]).unwrap();
        assert_eq!(tournament_min(&mut l, &ids).unwrap(), ids[0]);
        assert_eq!(l.total(), 0);

        let (mut l, ids) = Ledger::new(vec![4, 2]).unwrap();
        assert_eq!(tournament_min(&mut l, &ids).unwrap(), ids[1]);
        assert_eq!(l.counts(), &[1, 1]);
        assert!(tournament_min(&mut l, &[]).is_err());
    }

    #[test]
    fn thousand_players_at_most_ten_rounds() {
        let values: Vec<i64> = (0..1000).map(|i| (i * 7919) % 1000).collect();
        let (mut l, ids) = Ledger::new(values).unwrap();
        let w = tournament_min(&mut l, &ids).unwrap();
        assert_eq!(w.index(), 0);
        assert!(l.profile(None).max <= 10);
        assert_eq!(l.total(), 999);
    }

    #[test]
    fn ceil_log2_values() {
        let got: Vec<u32> = [1, 2, 3, 4, 5, 8, 9, 1000, 1024, 1025]
            .iter()
            .map(|&m| ceil_log2(m))
            .collect();
        assert_eq!(got, vec![0, 1, 2, 2, 3, 3, 4, 10, 10, 11]);
    }
}

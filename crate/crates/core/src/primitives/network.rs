//! Batcher odd-even merge sort as an explicit layered comparator schedule.
//!
//! The schedule for `m` wires is the power-of-two network pruned to comparators
//! whose both ends are real wires. Padding wires behave as `+inf` sentinels:
//! a comparator `(i, j)` with `i < j` always leaves the larger value on `j`, so
//! a sentinel never leaves its wire and every pruned comparator is a no-op.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ledger::{ElementId, Ledger};
use crate::primitives::tournament::ceil_log2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparatorSchedule {
    size: usize,
    layers: Vec<Vec<(usize, usize)>>,
}

impl ComparatorSchedule {
    pub fn batcher(size: usize) -> Self {
        let padded = size.next_power_of_two().max(1);
        let mut layers = Vec::new();
        let mut p = 1;
        while p < padded {
            let mut k = p;
            while k >= 1 {
                let mut layer = Vec::new();
                let mut j = k % p;
                while j + k < padded {
                    for i in 0..k.min(padded - j - k) {
                        let (lo, hi) = (i + j, i + j + k);
                        if lo / (2 * p) == hi / (2 * p) && hi < size {
                            layer.push((lo, hi));
                        }
                    }
                    j += 2 * k;
                }
                if !layer.is_empty() {
                    layers.push(layer);
                }
                k /= 2;
            }
            p *= 2;
        }
        ComparatorSchedule { size, layers }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<(usize, usize)>] {
        &self.layers
    }

    pub fn comparator_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Runs the network on plain data (no ledger involved).
    pub fn apply<V: Ord>(&self, data: &mut [V]) {
        assert_eq!(data.len(), self.size, "schedule size mismatch");
        for layer in &self.layers {
            for &(i, j) in layer {
                if data[j] < data[i] {
                    data.swap(i, j);
                }
            }
        }
    }

    /// Plain-text form: `size <m>` followed by one line per layer of
    /// space-separated `i:j` pairs.
    pub fn to_text(&self) -> String {
        let mut out = format!("size {}\n", self.size);
        for layer in &self.layers {
            let line: Vec<String> = layer.iter().map(|(i, j)| format!("{i}:{j}")).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::ScheduleFormat(msg);
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| bad("missing size line".into()))?;
        let size = header
            .trim()
            .strip_prefix("size ")
            .and_then(|s| s.trim().parse::<usize>().ok())
            .ok_or_else(|| bad(format!("bad header {header:?}")))?;
        let mut layers = Vec::new();
        for line in lines {
            let mut layer = Vec::new();
            for tok in line.split_whitespace() {
                let (i, j) = tok
                    .split_once(':')
                    .and_then(|(a, b)| Some((a.parse::<usize>().ok()?, b.parse::<usize>().ok()?)))
                    .ok_or_else(|| bad(format!("bad comparator {tok:?}")))?;
                if i >= j || j >= size {
                    return Err(bad(format!("comparator {tok} out of range")));
                }
                layer.push((i, j));
            }
            layers.push(layer);
        }
        Ok(ComparatorSchedule { size, layers })
    }
}

/// Depth of the full Batcher network on `ceil(log2 m)` levels.
pub fn batcher_depth(m: usize) -> usize {
    let p = ceil_log2(m) as usize;
    p * (p + 1) / 2
}

/// Sorts ascending (strict order) by simulating the Batcher schedule.
pub fn network_sort<T: Ord>(ledger: &mut Ledger<T>, ids: &[ElementId]) -> Result<Vec<ElementId>> {
    let schedule = ComparatorSchedule::batcher(ids.len());
    run_schedule(ledger, &schedule, ids)
}

pub fn run_schedule<T: Ord>(
    ledger: &mut Ledger<T>,
    schedule: &ComparatorSchedule,
    ids: &[ElementId],
) -> Result<Vec<ElementId>> {
    assert_eq!(ids.len(), schedule.size(), "schedule size mismatch");
    let mut slots = ids.to_vec();
    for layer in schedule.layers() {
        for &(i, j) in layer {
            if ledger.less(slots[j], slots[i])? {
                slots.swap(i, j);
            }
        }
    }
    Ok(slots)
}

/// Lower median via a full network sort.
pub fn small_median<T: Ord>(ledger: &mut Ledger<T>, ids: &[ElementId]) -> Result<ElementId> {
    if ids.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sorted = network_sort(ledger, ids)?;
    Ok(sorted[(sorted.len() - 1) / 2])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depths_match_formula_on_powers_of_two() {
        assert_eq!(ComparatorSchedule::batcher(2).depth(), 1);
        assert_eq!(ComparatorSchedule::batcher(4).depth(), 3);
        for p in 0..=10 {
            let m = 1usize << p;
            assert_eq!(
                ComparatorSchedule::batcher(m).depth(),
                batcher_depth(m),
                "m={m}"
            );
        }
        for m in 1..=40 {
            assert!(ComparatorSchedule::batcher(m).depth() <= batcher_depth(m));
        }
    }

    #[test]
    fn four_wire_network_enumerated() {
        let s = ComparatorSchedule::batcher(4);
        assert_eq!(
            s.layers(),
            &[vec![(0, 1), (2, 3)], vec![(0, 2), (1, 3)], vec![(1, 2)]]
        );
    }

    #[test]
    fn layers_are_disjoint() {
        for m in 1..=70 {
            for layer in ComparatorSchedule::batcher(m).layers() {
                let mut seen = vec![false; m];
                for &(i, j) in layer {
                    assert!(!seen[i] && !seen[j], "m={m}");
                    seen[i] = true;
                    seen[j] = true;
                }
            }
        }
    }

    #[test]
    fn zero_one_principle_exhaustive() {
        for m in 0..=12usize {
            let s = ComparatorSchedule::batcher(m);
            for mask in 0u32..(1 << m) {
                let mut bits: Vec<u8> = (0..m).map(|i| ((mask >> i) & 1) as u8).collect();
                s.apply(&mut bits);
                assert!(bits.windows(2).all(|w| w[0] <= w[1]), "m={m} mask={mask:b}");
            }
        }
    }

    #[test]
    fn text_round_trip_and_golden() {
        let s = ComparatorSchedule::batcher(4);
        let text = s.to_text();
        assert_eq!(text, "size 4\n0:1 2:3\n0:2 1:3\n1:2\n");
        assert_eq!(ComparatorSchedule::from_text(&text).unwrap(), s);
        assert!(ComparatorSchedule::from_text("size 3\n0:5\n").is_err());
        assert!(ComparatorSchedule::from_text("").is_err());
    }

    #[test]
    fn network_sort_fragility_bounded_by_depth() {
        let values: Vec<i64> = (0..1024).map(|i| (i * 389 + 17) % 1024).collect();
        let (mut l, ids) = Ledger::new(values).unwrap();
        let sorted = network_sort(&mut l, &ids).unwrap();
        assert_eq!(sorted, l.audit_sorted(&ids).unwrap());
        assert!(l.profile(None).max <= 55);
    }

    #[test]
    fn small_median_cases() {
        let (mut l, ids) = Ledger::new(vec![7]).unwrap();
        assert_eq!(small_median(&mut l, &ids).unwrap(), ids[0]);
        let (mut l, ids) = Ledger::new(vec![2, 1]).unwrap();
        assert_eq!(small_median(&mut l, &ids).unwrap(), ids[1]);
        let values: Vec<i64> = (0..513).map(|i| (i * 211) % 513).collect();
        let (mut l, ids) = Ledger::new(values).unwrap();
        let med = small_median(&mut l, &ids).unwrap();
        assert_eq!(med, l.audit_sorted(&ids).unwrap()[256]);
        assert!(l.profile(None).max <= batcher_depth(513) as u64);
        assert_eq!(batcher_depth(513), 55);
    }
}

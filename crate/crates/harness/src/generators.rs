//! Input sequences with a prescribed amount of disorder.
//!
//! All generators return distinct values from `0..n` unless passed through
//! [`with_duplicates`].

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::error::{HarnessError, Result};

pub fn max_inversions(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

pub fn gen_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<i64> {
    let mut v: Vec<i64> = (0..n as i64).collect();
    v.shuffle(rng);
    v
}

/// Uniform composition of `n` into `parts` positive parts.
fn composition<R: Rng + ?Sized>(n: usize, parts: usize, rng: &mut R) -> Vec<usize> {
    let mut cuts: Vec<usize> = index::sample(rng, n - 1, parts - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    cuts.push(n);
    let mut prev = 0;
    cuts.into_iter()
        .map(|c| {
            let len = c - prev;
            prev = c;
            len
        })
        .collect()
}

/// A sequence with exactly `runs` maximal ascending runs.
///
/// Up to `n / 2` runs, a random permutation is cut into parts of length at
/// least 2, each part is sorted, and any boundary that fails to descend is
/// repaired by swapping the maximum of the left part with the minimum of the
/// right one. Beyond that, runs take consecutive value blocks in descending
/// block order.
pub fn gen_controlled_runs<R: Rng + ?Sized>(
    n: usize,
    runs: usize,
    rng: &mut R,
) -> Result<Vec<i64>> {
    if runs == 0 || runs > n {
        return Err(HarnessError::InfeasibleTarget(format!(
            "{runs} runs in {n} elements"
        )));
    }
    if 2 * runs > n {
        let lengths = composition(n, runs, rng);
        let mut out = Vec::with_capacity(n);
        let mut top = n as i64;
        for len in lengths {
            out.extend(top - len as i64..top);
            top -= len as i64;
        }
        return Ok(out);
    }
    let lengths: Vec<usize> = composition(n - runs, runs, rng)
        .into_iter()
        .map(|l| l + 1)
        .collect();
    let perm = gen_random(n, rng);
    let mut parts: Vec<Vec<i64>> = Vec::with_capacity(runs);
    let mut start = 0;
    for len in lengths {
        let mut part = perm[start..start + len].to_vec();
        part.sort_unstable();
        parts.push(part);
        start += len;
    }
    for j in 1..parts.len() {
        let (left, right) = parts.split_at_mut(j);
        let (l, r) = (
            left[j - 1].last_mut().unwrap(),
            right[0].first_mut().unwrap(),
        );
        if *l < *r {
            // parts have length >= 2, so the swapped values stay the extremes
            std::mem::swap(l, r);
        }
    }
    Ok(parts.concat())
}

/// A sequence with exactly `inv` inversions, built from ascending order by
/// swapping random ascending adjacent pairs (each swap adds one inversion).
/// Targets above half the maximum are built for the complement and mirrored.
pub fn gen_controlled_inv<R: Rng + ?Sized>(n: usize, inv: u64, rng: &mut R) -> Result<Vec<i64>> {
    let max = max_inversions(n);
    if inv > max {
        return Err(HarnessError::InfeasibleTarget(format!(
            "{inv} inversions in {n} elements (max {max})"
        )));
    }
    let mirrored = inv > max / 2;
    let target = if mirrored { max - inv } else { inv };
    let mut v: Vec<i64> = (0..n as i64).collect();
    let mut made = 0;
    while made < target {
        let i = rng.random_range(0..n - 1);
        if v[i] < v[i + 1] {
            v.swap(i, i + 1);
            made += 1;
        }
    }
    if mirrored {
        for x in &mut v {
            *x = n as i64 - 1 - *x;
        }
    }
    Ok(v)
}

/// `floor(sqrt(k))` smallest values shuffled, then the rest ascending.
pub fn gen_lower_bound_instance<R: Rng + ?Sized>(
    n: usize,
    k: u64,
    rng: &mut R,
) -> Result<Vec<i64>> {
    if k > (n as u64).saturating_mul(n as u64) {
        return Err(HarnessError::InfeasibleTarget(format!(
            "k = {k} exceeds n^2"
        )));
    }
    let s = (k.isqrt() as usize).min(n);
    let mut v: Vec<i64> = (0..n as i64).collect();
    v[..s].shuffle(rng);
    Ok(v)
}

/// An ascending run of `n - 1` values with one more value inserted at a
/// random position.
pub fn gen_adversarial_run_plus_one<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<i64>> {
    if n == 0 {
        return Err(HarnessError::InfeasibleTarget("empty input".into()));
    }
    let x = rng.random_range(0..n as i64);
    let mut v: Vec<i64> = (0..n as i64).filter(|&y| y != x).collect();
    v.insert(rng.random_range(0..n), x);
    Ok(v)
}

/// Two ascending runs: a random `split`-subset of `0..n`, then the rest.
pub fn gen_two_runs<R: Rng + ?Sized>(n: usize, split: usize, rng: &mut R) -> Result<Vec<i64>> {
    if split > n {
        return Err(HarnessError::InfeasibleTarget(format!(
            "split {split} > n = {n}"
        )));
    }
    let mut first: Vec<i64> = index::sample(rng, n, split)
        .into_iter()
        .map(|i| i as i64)
        .collect();
    first.sort_unstable();
    let mut taken = vec![false; n];
    for &x in &first {
        taken[x as usize] = true;
    }
    first.extend((0..n as i64).filter(|&x| !taken[x as usize]));
    Ok(first)
}

/// Halves every value so that pairs of consecutive values tie.
pub fn with_duplicates(values: &mut [i64]) {
    for v in values {
        *v /= 2;
    }
}

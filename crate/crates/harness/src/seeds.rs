//! Per-trial random streams.
//!
//! Trial `i` of an experiment with seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(splitmix64(s + (i + 1) * GOLDEN))`, with wrapping
//! arithmetic. Streams depend only on `(s, i)`, so trials can run in any order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn child_seed(seed: u64, trial: usize) -> u64 {
    splitmix64(seed.wrapping_add((trial as u64 + 1).wrapping_mul(GOLDEN)))
}

pub fn child_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(child_seed(seed, trial))
}

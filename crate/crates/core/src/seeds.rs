//! Seed schedule for reproducible, order-independent randomness.
//!
//! Every random stream is keyed by a tuple of integers (base seed, replication,
//! purpose, ...). Streams never share state, so adding replications or changing
//! the thread count leaves existing streams untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags. Values are part of the reproducibility contract; do not renumber.
pub mod stream {
    pub const DESIGN: u64 = 1;
    pub const TRUTH: u64 = 2;
    pub const RESPONSE: u64 = 3;
    pub const CV_FOLDS: u64 = 4;
    pub const ORACLE_DRAW: u64 = 5;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with a path of indices into a new 64-bit seed.
pub fn derive(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived_rng(base: u64, path: &[u64]) -> ChaCha8Rng {
    rng(derive(base, path))
}

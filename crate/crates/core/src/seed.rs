//! Deterministic seed derivation.
//!
//! Every random stream in a sweep is keyed by a 64-bit seed derived from the
//! master seed and the coordinates of the work item, so results never depend
//! on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of words into `base`, one SplitMix64 round per word.
pub fn mix(base: u64, words: &[u64]) -> u64 {
    words
        .iter()
        .fold(splitmix64(base), |acc, &w| splitmix64(acc ^ splitmix64(w)))
}

/// The generator used everywhere in the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

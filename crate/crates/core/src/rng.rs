//! Seeded randomness shared by every stage.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Generator used wherever a seed is accepted.
pub type SimRng = ChaCha20Rng;

/// Recorded in logs and provenance so runs can be reproduced with the same generator.
pub const RNG_ALGORITHM: &str = "chacha20 (rand_chacha 0.3, rand 0.8 sampling)";

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent sub-seed from a base seed and a label, so that
/// separate stages and jobs never share a random stream.
pub fn derive_seed(base: u64, label: &str) -> u64 {
    let mut h = splitmix64(base);
    for b in label.bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    h
}

//! Seeded, order-independent random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifier of the generator recorded alongside every sampled result.
pub const GENERATOR_ID: &str = "chacha8/rand_chacha-0.3";

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of stream `index` from a base seed.
///
/// Shot `i` of a run always uses `derive_seed(seed, i)`, so parallel and
/// sequential execution produce identical samples.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

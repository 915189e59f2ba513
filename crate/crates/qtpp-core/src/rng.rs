//! Deterministic derivation of per-trial random streams.
//!
//! Every trial gets its own ChaCha8 stream seeded as
//! `mix64(mix64(master_seed + salt) ^ mix64(trial_index))`, where `mix64` is
//! the SplitMix64 finalizer. `salt` separates the independent scenarios of a
//! single invocation (sweep points, the floor/attack runs of a comparison) so
//! they never share a stream. The scheme is versioned via [`RNG_SCHEME`] and
//! recorded in every report; changing the derivation requires bumping it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const RNG_SCHEME: &str = "splitmix64-chacha8-v1";

/// SplitMix64 finalizer: bijective, avalanching 64-bit mix.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_rng(master_seed: u64, salt: u64, trial_index: u64) -> ChaCha8Rng {
    let seed = mix64(mix64(master_seed.wrapping_add(salt)) ^ mix64(trial_index));
    ChaCha8Rng::seed_from_u64(seed)
}

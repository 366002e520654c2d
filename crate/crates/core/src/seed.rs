//! Deterministic sub-seed derivation.
//!
//! Sweeps and null-distribution replicates each derive their own seed from a
//! master seed plus structural indices, so parallel and serial execution of
//! independent jobs produce identical results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; bijective on u64.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and up to two structural indices
/// (for example sweep point and replicate number).
pub fn derive_seed(master: u64, point: u64, replicate: u64) -> u64 {
    mix(mix(mix(master) ^ point) ^ replicate)
}

/// Seeded RNG used throughout the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

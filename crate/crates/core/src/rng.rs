//! Seeded randomness. Every stochastic component draws from a ChaCha8
//! stream created from an explicit seed, so runs are bit-reproducible
//! across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used throughout the simulator.
pub type SimRng = ChaCha8Rng;

/// Build a stream from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Derive an independent child seed from a root seed and a stream tag.
///
/// Used to give each subsystem (channel, demands, GA, ML) and each TTI its
/// own stream without the subsystems having to share RNG state.
pub fn derive_seed(root: u64, stream: u64) -> u64 {
    splitmix64(root ^ splitmix64(stream.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

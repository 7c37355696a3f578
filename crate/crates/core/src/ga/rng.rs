//! Seedable random streams.
//!
//! All randomness in the GA and the swarm planner flows through [`GaRng`]
//! so that a `(seed, params)` pair replays bit-identically. Independent
//! streams for different clients are carved out of one seed with
//! [`stream`], which uses ChaCha's 64-bit stream selector rather than
//! reseeding.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used everywhere in this workspace.
pub type GaRng = ChaCha8Rng;

/// Identifier of the generator algorithm, recorded in run metadata.
pub const RNG_ALGORITHM: &str = "chacha8";

pub fn seeded(seed: u64) -> GaRng {
    GaRng::seed_from_u64(seed)
}

/// Returns stream `index` of the generator keyed by `seed`.
pub fn stream(seed: u64, index: u64) -> GaRng {
    let mut rng = GaRng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

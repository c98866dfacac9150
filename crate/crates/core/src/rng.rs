//! Seeded, splittable random streams.
//!
//! Each experiment point or Monte-Carlo trial gets its own ChaCha stream
//! derived from `(seed, stream id)`, so results do not depend on how work is
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ExperimentRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> ExperimentRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derived(seed: u64, stream: u64) -> ExperimentRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for a two-level index (e.g. parameter point and trial).
pub fn stream_id(point: u64, trial: u64) -> u64 {
    (point << 32) | (trial & 0xffff_ffff)
}

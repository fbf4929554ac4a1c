//! Seeded RNG substreams.
//!
//! Every random decision draws from a ChaCha8 stream keyed by
//! `(seed, entity, purpose)`, so changing the scheduler never perturbs the
//! traffic realization of a station, and vice versa.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand_chacha::ChaCha8Rng as StreamRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Traffic = 0,
    OboInit = 1,
    OboRu = 2,
    Shuffle = 3,
}

/// Entity id of the access point (scheduler shuffles).
pub const AP_ENTITY: u64 = 1 << 40;

pub fn substream(seed: u64, entity: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((entity << 2) | purpose as u64);
    rng
}

//! Seeded, addressable random streams.
//!
//! Every random decision in the crate draws from a ChaCha8 stream selected by
//! `(master seed, purpose, a, b)`, so results do not depend on evaluation
//! order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for; part of the stream address.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Coloring = 1,
    Telemetry = 2,
    Connector = 3,
    Generator = 4,
    Jitter = 5,
    Attack = 6,
    Sampling = 7,
}

/// Stream for `(purpose, a, b)` under `master`. `a` is truncated to 16 bits
/// and `b` to 32 bits.
pub fn substream(master: u64, purpose: Purpose, a: u64, b: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(((purpose as u64) << 48) | ((a & 0xFFFF) << 32) | (b & 0xFFFF_FFFF));
    rng
}

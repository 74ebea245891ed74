//! Seeded random streams.
//!
//! Every consumer of randomness derives an independent ChaCha stream from a
//! `(root_seed, stream_id)` pair. ChaCha is counter based, so stream `k` can
//! be produced without generating streams `0..k`, and results do not depend
//! on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Returns the stream for `(root_seed, stream_id)`.
pub fn stream(root_seed: u64, stream_id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(stream_id);
    rng
}

/// Sub-stream identifiers are namespaced so that, for example, the buyers of
/// a Miller auction never share a stream with path 0 of a wealth simulation
/// under the same root seed.
pub(crate) mod ns {
    pub const GAMES: u64 = 1 << 62;
    pub const AUCTION: u64 = 1 << 61;
    pub const ADAPTIVE: u64 = 1 << 60;
}

//! Counter-style stream splitting: every independent unit of work (a trial, a
//! training step) gets its own ChaCha stream keyed by `(seed, stream)`, so the
//! draws do not depend on how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Packs two counters into one stream id. `outer` must fit in 32 bits.
pub(crate) fn stream_id(outer: u64, inner: u64) -> u64 {
    debug_assert!(outer < 1 << 32 && inner < 1 << 32);
    (outer << 32) | inner
}

//! Seeded, worker-count independent sampling.
//!
//! A run of `total` draws is cut into fixed chunks of [`CHUNK`] draws; chunk
//! `i` uses ChaCha8 seeded with the run seed on stream `i`. Chunk results are
//! merged in index order, so the outcome depends only on `(seed, total)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::group::{Element, Group};

pub(crate) const CHUNK: u64 = 1 << 14;

pub(crate) fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `f(rng, draws)` on every chunk in parallel and returns the per-chunk
/// results in chunk order.
pub(crate) fn map_chunks<T, F>(seed: u64, total: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let draws = CHUNK.min(total - c * CHUNK);
            let mut rng = chunk_rng(seed, c);
            f(&mut rng, draws)
        })
        .collect()
}

#[inline]
pub(crate) fn uniform_element(rng: &mut ChaCha8Rng, g: &Group) -> Element {
    let i = rng.gen_range(0..g.order() as u32);
    g.element(i as usize).expect("sampled index is in range")
}

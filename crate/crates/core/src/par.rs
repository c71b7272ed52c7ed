//! Chunked data-parallel execution with counter-based random substreams.
//!
//! Work of `n` items is cut into fixed chunks of [`CHUNK`] items. Chunk `c`
//! of a job tagged `tag` draws from the ChaCha stream keyed by the user seed
//! and selected by `(tag, c)`, so each chunk's output depends only on
//! `(seed, tag, c)`. Chunk results come back in chunk order. With the
//! `parallel` feature chunks run on the rayon pool; without it they run
//! sequentially and produce identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Items per chunk.
pub const CHUNK: u64 = 1 << 14;

/// Random generator for chunk `chunk` of the job `tag` under `seed`.
pub fn stream_rng(seed: u64, tag: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(mix(tag, chunk));
    rng
}

/// Generator for a single keyed draw (e.g. one context of one elementary state).
pub fn keyed_rng(seed: u64, key: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(key);
    rng
}

fn mix(tag: u64, chunk: u64) -> u64 {
    splitmix64(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ splitmix64(chunk))
}

/// Seed of item `i` in a job seeded by `seed`. Item seeds of different jobs
/// only coincide when the hashed job seeds lie within the item count of each
/// other.
pub fn item_seed(seed: u64, i: u64) -> u64 {
    splitmix64(splitmix64(seed).wrapping_add(i))
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs `f(chunk_index, start..end)` over all chunks of `0..n`, returning the
/// results in chunk order.
pub fn map_chunks<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, std::ops::Range<u64>) -> T + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    let run = |c: u64| f(c, c * CHUNK..((c + 1) * CHUNK).min(n));
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks).map(run).collect()
    }
}

/// Maps over a slice of independent jobs, preserving order.
pub fn map_jobs<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

//! Counter-based random streams.
//!
//! Every sample owns its generator, seeded from
//! `(master seed, stream index, sample index)` through a SplitMix64-style
//! mixer. Samples can therefore be produced by any number of workers in any
//! order and still reproduce bit-for-bit.

use rand::SeedableRng;
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Generator handed to each sample.
pub type SampleRng = Xoshiro256PlusPlus;

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A master seed plus a stream index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamId {
    pub master_seed: u64,
    pub stream: u64,
}

impl StreamId {
    pub fn new(master_seed: u64, stream: u64) -> Self {
        Self { master_seed, stream }
    }

    /// A stream derived from this one and a label; distinct labels give
    /// unrelated streams.
    pub fn substream(&self, label: u64) -> Self {
        Self { master_seed: self.master_seed, stream: mix(mix(self.stream) ^ label.rotate_left(17)) }
    }

    pub fn sample_rng(&self, index: u64) -> SampleRng {
        let key = mix(self.master_seed ^ mix(self.stream ^ mix(index)));
        let mut seeder = SplitMix64::seed_from_u64(key);
        SampleRng::from_rng(&mut seeder)
    }
}

/// Evaluates `f` for sample indices `0..count` on the current rayon pool,
/// returning results in index order.
pub fn par_samples<T, F>(stream: StreamId, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut SampleRng) -> T + Sync + Send,
{
    (0..count).into_par_iter().with_min_len(256).map(|i| f(&mut stream.sample_rng(i as u64))).collect()
}

/// Fallible version of [`par_samples`].
pub fn try_par_samples<T, E, F>(stream: StreamId, count: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(&mut SampleRng) -> Result<T, E> + Sync + Send,
{
    (0..count).into_par_iter().with_min_len(256).map(|i| f(&mut stream.sample_rng(i as u64))).collect()
}

//! Reproducible, splittable random sources.
//!
//! Every simulation in this crate is seeded through a [`RandomSource`]: a
//! `(seed, stream)` pair mapped onto a counter-based generator (ChaCha8).
//! The same pair always produces the same draw sequence, on any platform
//! and under any thread count; distinct streams are statistically
//! independent. Parallel loops hand each replicate its own derived child
//! source, so scheduling never touches the numbers.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifies one reproducible random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
}

/// SplitMix64 finalizer; used to spread stream ids over the full 64-bit range.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RandomSource {
    /// Root source for a user-visible seed (stream 0).
    pub const fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    pub const fn with_stream(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub const fn seed(&self) -> u64 {
        self.seed
    }

    pub const fn stream(&self) -> u64 {
        self.stream
    }

    /// Derive the `index`-th child stream. A source is single-consumer;
    /// parallel callers must give each worker its own child.
    pub fn child(&self, index: u64) -> Self {
        Self {
            seed: self.seed,
            stream: splitmix64(self.stream ^ splitmix64(index)),
        }
    }

    /// Namespaced child, used so that unrelated operations sharing one user
    /// seed (tables, bands, p-values...) never reuse a stream.
    pub(crate) fn tagged(&self, tag: u64) -> Self {
        Self {
            seed: self.seed,
            stream: splitmix64(self.stream ^ splitmix64(tag).rotate_left(32)),
        }
    }

    /// Instantiate the generator for this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

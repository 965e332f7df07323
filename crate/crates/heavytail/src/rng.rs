//! Seeded randomness with deterministic substream derivation.
//!
//! Every randomized operation in this crate draws from a [`SeededRng`].
//! Substreams are derived from the parent *seed* (not the parent stream
//! state), so work items dispatched to a thread pool see the same stream
//! regardless of scheduling order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic RNG handle that remembers the seed it was built from.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The seed this handle was created with.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derive an independent child stream identified by `tags`.
    ///
    /// The child seed depends only on `(self.seed, tags)`, never on how much
    /// of the parent stream has been consumed.
    pub fn substream(&self, tags: &[u64]) -> SeededRng {
        let mut state = self.seed ^ 0x9e37_79b9_7f4a_7c15;
        for &t in tags {
            state = splitmix64(state ^ splitmix64(t));
        }
        SeededRng::new(splitmix64(state))
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

/// SplitMix64 finalizer; a well-mixed injective u64 -> u64 map.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

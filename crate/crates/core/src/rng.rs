//! Counter-based random streams.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] whose key is
//! expanded from the master seed and whose 64-bit stream id is a hash of a
//! structured label (sweep point, realization, sample block, ...). Because
//! ChaCha is a counter-mode generator, two labels never share keystream and
//! a stream can be rebuilt from its label alone, which makes results
//! independent of how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use rand_chacha::ChaCha8Rng as StreamRng;

/// What a stream is used for. Part of the stream label so that, for example,
/// the graph draw and the Monte Carlo draws of one realization never collide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Graph = 1,
    Volume = 2,
    Other = 3,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A position in the stream tree: master seed plus a running label hash.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    seed: u64,
    label: u64,
}

impl StreamKey {
    pub fn root(seed: u64) -> Self {
        Self { seed, label: 0 }
    }

    /// Derive a child key. Children of distinct parents or with distinct
    /// indices get (with overwhelming probability) distinct labels.
    pub fn child(self, index: u64) -> Self {
        Self {
            seed: self.seed,
            label: splitmix64(self.label ^ splitmix64(index.wrapping_add(0x632B_E59B_D9B4_E019))),
        }
    }

    pub fn purpose(self, purpose: Purpose) -> Self {
        self.child(purpose as u64)
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        let mut state = self.seed;
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.label);
        rng
    }
}

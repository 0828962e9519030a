//! Counter-based stream derivation.
//!
//! Every random stream is keyed by `(master seed, purpose tag, index)`. The
//! key is hashed with FNV-1a and SplitMix64 into a ChaCha8 seed, so a stream
//! depends only on its key and never on which worker draws from it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(tag: &str) -> u64 {
    tag.bytes().fold(FNV_OFFSET, |h, b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamFactory {
    master: u64,
}

impl StreamFactory {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    pub fn stream_id(&self, tag: &str, index: u64) -> u64 {
        splitmix64(splitmix64(self.master ^ fnv1a(tag)) ^ splitmix64(index.wrapping_add(1)))
    }

    pub fn stream(&self, tag: &str, index: u64) -> StreamRng {
        let id = self.stream_id(tag, index);
        let mut seed = [0u8; 32];
        let mut state = id;
        for chunk in seed.chunks_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

//! Counter-based random streams.
//!
//! Every stream is keyed by `(seed, tag, replicate)`: the seed and tag select
//! a ChaCha key, the replicate index selects the ChaCha stream. Replicates are
//! therefore reproducible and independent of the order in which workers pick
//! them up.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Which part of a replicate consumes the stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamTag {
    Events,
    Marking,
    Forward,
    Backward,
    Pair,
    Limit,
    Parents,
    Auxiliary(u32),
}

impl StreamTag {
    fn code(self) -> u64 {
        match self {
            StreamTag::Events => 1,
            StreamTag::Marking => 2,
            StreamTag::Forward => 3,
            StreamTag::Backward => 4,
            StreamTag::Pair => 5,
            StreamTag::Limit => 6,
            StreamTag::Parents => 7,
            StreamTag::Auxiliary(k) => 0x100 + k as u64,
        }
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stream for one replicate of one component.
pub fn stream(seed: u64, tag: StreamTag, replicate: u64) -> SimRng {
    let mut state = seed ^ tag.code().wrapping_mul(0xD6E8_FEB8_6659_FD93);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(replicate);
    rng
}

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Root of all randomness in the crate.
///
/// Components never share a raw RNG; each derives its own stream from the
/// root seed and a textual label, so that the output of one component does
/// not depend on how many random numbers another consumed. The split is
/// documented and stable:
///
/// 1. `h = fnv1a64(label)` — FNV-1a over the label bytes;
/// 2. a SplitMix64 generator is seeded with `seed ^ h`;
/// 3. its first four outputs form the 32-byte ChaCha12 key.
///
/// Identical seed + identical label ⇒ identical stream, on every platform.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub u64);

impl Seed {
    /// Deterministic per-label random stream.
    pub fn stream(self, label: &str) -> ChaCha12Rng {
        let mut state = self.0 ^ fnv1a64(label.as_bytes());
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        ChaCha12Rng::from_seed(key)
    }

    /// Child seed for a labelled sub-experiment (e.g. suite members).
    pub fn derive(self, label: &str) -> Seed {
        let mut state = self.0 ^ fnv1a64(label.as_bytes());
        Seed(splitmix64(&mut state))
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

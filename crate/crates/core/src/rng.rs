//! Seed derivation for independent simulation streams.
//!
//! Every run owns a `ChaCha8Rng` seeded from a SplitMix64 expansion of the
//! master seed and a list of stream keys, so streams never overlap and adding a
//! new key (an algorithm, a seed) leaves every other stream untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `keys` into `master` one SplitMix step at a time.
pub fn derive_seed(master: u64, keys: &[u64]) -> u64 {
    let mut state = master;
    let mut out = splitmix64(&mut state);
    for &k in keys {
        state ^= k.wrapping_mul(GOLDEN) ^ out;
        out = splitmix64(&mut state);
    }
    out
}

/// FNV-1a, used to turn labels into stream keys.
pub fn label_key(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub fn stream(master: u64, keys: &[u64]) -> SimRng {
    let seed = derive_seed(master, keys);
    let mut bytes = [0u8; 32];
    let mut state = seed;
    for chunk in bytes.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}

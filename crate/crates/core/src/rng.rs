//! Deterministic random-number streams.
//!
//! All randomness in the crate flows from a single master seed, split into
//! independent named streams. A stream is identified by a string label plus an
//! integer index, so adding a new consumer (a new stream name) never perturbs
//! the values drawn by existing ones — unlike drawing every consumer's seed
//! from one shared sequence, where inserting a draw shifts everything after it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mix one 64-bit word into a running hash state (splitmix64 finalizer).
///
/// Used as the combining step for (master seed, stream label, index) so that
/// nearby seeds and labels land far apart in seed space.
fn mix(mut state: u64, word: u64) -> u64 {
    state = state.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(word);
    state = (state ^ (state >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    state = (state ^ (state >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    state ^ (state >> 31)
}

/// Derive the 64-bit seed for a named stream of the master seed.
///
/// The label is folded in bytewise (FNV-1a) before mixing, so stream names of
/// any length are supported and no two short names alias.
pub fn stream_seed(master: u64, label: &str, index: u64) -> u64 {
    let mut name_hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        name_hash ^= u64::from(*b);
        name_hash = name_hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut state = mix(master, name_hash);
    state = mix(state, index);
    state
}

/// A deterministic RNG for the given named stream of the master seed.
pub fn stream_rng(master: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master, label, index))
}

//! Deterministic randomness.
//!
//! Every random decision in the pipeline draws from a ChaCha stream whose
//! seed is derived from the single run seed plus a textual path naming the
//! decision ("train/tree/17/bootstrap", "importance/age/rep/3", ...). The
//! derivation uses a fixed FNV-64 mix so streams are stable across platforms
//! and releases, and independent streams make results invariant to the order
//! in which parallel work is scheduled.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(mut state: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        state ^= u64::from(b);
        state = state.wrapping_mul(FNV_PRIME);
    }
    state
}

/// Derive a child seed from the run seed and a path of context parts.
pub fn derive_seed(master: u64, parts: &[&str]) -> u64 {
    let mut state = fnv1a(FNV_OFFSET, &master.to_le_bytes());
    for part in parts {
        state = fnv1a(state, part.as_bytes());
        state = fnv1a(state, &[0xff]); // separator so ["ab","c"] != ["a","bc"]
    }
    state
}

/// ChaCha stream for the decision named by `parts`.
pub fn stream(master: u64, parts: &[&str]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, parts))
}

/// Fisher-Yates shuffle driven by a named stream.
pub fn shuffle_indices(master: u64, parts: &[&str], n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut rng = stream(master, parts);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    idx
}

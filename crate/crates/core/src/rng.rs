//! Seed derivation.
//!
//! Every random stream in the crate is a ChaCha8 generator seeded from a
//! single user seed through [`derive_seed`], so results never depend on thread
//! scheduling or on how many other streams were consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tags keep sub-seeds for unrelated purposes apart.
pub mod stream {
    pub const KMEANS_RESTART: u64 = 1;
    pub const SELECT_K_FOLDS: u64 = 2;
    pub const SELECT_K_FIT: u64 = 3;
    pub const EVAL_FOLDS: u64 = 4;
    pub const EVAL_FIT: u64 = 5;
    pub const COHORT: u64 = 6;
    pub const PERMUTATION: u64 = 7;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent sub-seed from `(seed, stream, index)`.
pub fn derive_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let a = splitmix64(seed);
    let b = splitmix64(a ^ stream.wrapping_mul(0xD6E8_FEB8_6659_FD93));
    splitmix64(b ^ index.wrapping_mul(0xA076_1D64_78BD_642F))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

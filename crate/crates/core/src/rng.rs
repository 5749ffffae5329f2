//! Seeding policy.
//!
//! Every random object in this crate is drawn from [`ChaCha8Rng`], a
//! counter-based stream cipher generator seeded from a single `u64` through
//! `SeedableRng::seed_from_u64`. Independent trials derive their seed as
//! `base_seed ^ trial_index`, so trials can run in any order or in parallel
//! without coordinating streams.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[inline]
pub fn trial_seed(base_seed: u64, trial: u64) -> u64 {
    base_seed ^ trial
}

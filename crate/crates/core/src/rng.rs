//! Seed splitting.
//!
//! All randomness derives from a master seed through `mix`, the splitmix64
//! finalizer. Replication `r` runs on `seed ^ mix(r ^ REP_SALT)`, unit `i` of a
//! run draws from a ChaCha8 stream seeded with `run_seed ^ mix(i)`, and the
//! treatment assignment of a run uses a separate stream seeded with
//! `mix(run_seed ^ ASSIGN_SALT)`. None of this depends on the worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const REP_SALT: u64 = 0x5245_5053_414c_5431;
pub const ASSIGN_SALT: u64 = 0x4153_5349_474e_3031;

/// splitmix64 output function.
pub fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn rep_seed(seed: u64, rep: u64) -> u64 {
    seed ^ mix(rep ^ REP_SALT)
}

pub fn unit_rng(seed: u64, unit: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ mix(unit))
}

pub fn assignment_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(seed ^ ASSIGN_SALT))
}

//! Counter-based seed derivation.
//!
//! Every random stream in the toolkit is a ChaCha8 generator seeded from a
//! 64-bit value. Independent streams are derived from a base seed with
//! [`derive`], which mixes `(base, stream, index)` through SplitMix64. A grid
//! cell `c` and a trial `k` get the seed `derive(base, c, k)`, so cells and
//! trials can run in any order and on any number of threads while producing
//! identical samples.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random generator used by every sampler.
pub type Rng = ChaCha8Rng;

/// Default seed when neither a config nor the environment provides one.
pub const DEFAULT_SEED: u64 = 0x5eed_1d5c_0ffe_e001;

/// Environment variable consulted by the CLI for a default seed.
pub const SEED_ENV: &str = "W1CONC_SEED";

/// One SplitMix64 output step.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of stream `(stream, index)` under `base`.
pub fn derive(base: u64, stream: u64, index: u64) -> u64 {
    let a = splitmix64(base);
    let b = splitmix64(a ^ stream.wrapping_mul(0xd2b7_4407_b1ce_6e93));
    splitmix64(b ^ index.wrapping_mul(0xca5a_8263_9512_1157))
}

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

//! Seed derivation for independent, schedule-free random streams.
//!
//! Every parallel unit of work (a tree, a module, a fold, an imputed
//! column) gets its own generator keyed by the run seed and a path of
//! indices, so results never depend on which thread ran what.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Domain tags so that, e.g., tree 3 and fold 3 never share a stream.
pub mod tag {
    pub const TREE: u64 = 0x7265_6501;
    pub const VIM: u64 = 0x7669_6d02;
    pub const RFE_ROUND: u64 = 0x7266_6503;
    pub const MODULE: u64 = 0x6d6f_6404;
    pub const SELECT: u64 = 0x7365_6c05;
    pub const FINAL: u64 = 0x6669_6e06;
    pub const FOLD: u64 = 0x666f_6c07;
    pub const IMPUTE: u64 = 0x696d_7008;
    pub const SPLIT: u64 = 0x7370_6c09;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a base seed with a path of stream indices.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn stream(base: u64, path: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(base, path))
}

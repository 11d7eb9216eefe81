//! Random streams.
//!
//! Every chain owns a `ChaCha8Rng`. Independent streams for replicates are
//! derived from a master seed with [`derive_seed`]: SplitMix64 applied to
//! `master XOR (index + 1) * 0x9E3779B97F4A7C15`. The derived seed is what
//! replicate manifests record.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ChainRng = ChaCha8Rng;

pub fn chain_rng(seed: u64) -> ChainRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

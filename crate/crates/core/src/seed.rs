//! Deterministic seed derivation.
//!
//! Every random stream in an experiment is keyed off one master seed, so a run
//! is reproducible from its configuration alone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed from `(parent, tag, index)`.
pub fn derive(parent: u64, tag: u64, index: u64) -> u64 {
    mix(mix(mix(parent) ^ tag) ^ index)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// Stream tags. Arbitrary but fixed: changing one changes every recorded run.
pub(crate) const TAG_TARGETS: u64 = 0x7461_7267;
pub(crate) const TAG_TRIAL: u64 = 0x7472_6961;
pub(crate) const TAG_THETA0: u64 = 0x7468_6530;
pub(crate) const TAG_OPTIMIZER: u64 = 0x6f70_7469;
pub(crate) const TAG_EVAL: u64 = 0x6576_616c;
pub(crate) const TAG_FINAL: u64 = 0x6669_6e61;
pub(crate) const TAG_CHECKPOINT: u64 = 0x6368_6b70;

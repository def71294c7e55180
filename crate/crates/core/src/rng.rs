//! Reproducible random streams.
//!
//! Every trial owns a single root seed. Stage `k` of a run draws its
//! select-samples from stream `2k` and its verify-samples from stream `2k + 1`
//! of a ChaCha8 generator keyed by that root seed, so a trace depends only on
//! the root seed and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StageRng = ChaCha8Rng;

/// Stream of the ChaCha8 generator keyed by `root_seed`.
pub fn stream_rng(root_seed: u64, stream: u64) -> StageRng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(stream);
    rng
}

/// Select-sample stream for stage `stage`.
pub fn select_stream(root_seed: u64, stage: usize) -> StageRng {
    stream_rng(root_seed, 2 * stage as u64)
}

/// Verify-sample stream for stage `stage`.
pub fn verify_stream(root_seed: u64, stage: usize) -> StageRng {
    stream_rng(root_seed, 2 * stage as u64 + 1)
}

/// Child seed number `index` of `root` (one SplitMix64 step over `root + index`).
pub fn derive_seed(root: u64, index: u64) -> u64 {
    let mut z = root
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

//! Deterministic RNG streams for reproducible parallel replication.
//!
//! Every replicate owns an independent stream derived from
//! `(master_seed, replicate_index)` by a SplitMix64 finalizer, so reports are
//! bitwise identical for any worker count or scheduling order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalization step (deterministic 64-bit mixer).
#[inline]
#[must_use]
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replicate `index` under `master_seed`.
#[inline]
#[must_use]
pub fn replicate_seed(master_seed: u64, index: u64) -> u64 {
    mix64(master_seed ^ mix64(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// The RNG handed to one replicate. ChaCha8 is portable across platforms and
/// fast enough for the 10^9-draw coupling experiments.
pub type ReplicateRng = ChaCha8Rng;

/// Build the RNG stream owned by replicate `index`.
#[must_use]
pub fn replicate_rng(master_seed: u64, index: u64) -> ReplicateRng {
    ChaCha8Rng::seed_from_u64(replicate_seed(master_seed, index))
}

/// Precomputed Bernoulli thresholds for the Feller ξ-sequence.
///
/// `ξ_1 ≡ 1`; for `i ≥ 2`, `ξ_i ~ Bernoulli(θ/(θ+i-1))` is drawn as
/// `next_u64() < threshold[i-2]`. The table is built once per (θ, length) and
/// shared read-only across replicates, which keeps the hot loop free of
/// divisions.
#[derive(Debug, Clone)]
pub struct XiTable {
    pub theta: f64,
    thresholds: Vec<u64>,
}

impl XiTable {
    /// Thresholds covering positions `2..=len`.
    #[must_use]
    pub fn new(theta: f64, len: usize) -> Self {
        let mut thresholds = Vec::with_capacity(len.saturating_sub(1));
        for i in 2..=len as u64 {
            let p = theta / (theta + (i - 1) as f64);
            thresholds.push(probability_to_threshold(p));
        }
        Self { theta, thresholds }
    }

    /// Number of positions covered (starting at i = 2).
    #[must_use]
    pub fn len(&self) -> usize {
        self.thresholds.len() + 1
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        false // position 1 is always covered (ξ_1 ≡ 1)
    }

    /// Draw ξ_i for `i ≥ 2` (caller guarantees `i ≤ len`).
    #[inline]
    pub fn draw(&self, rng: &mut ReplicateRng, i: u64) -> bool {
        use rand_chacha::rand_core::RngCore;
        debug_assert!(i >= 2);
        rng.next_u64() < self.thresholds[(i - 2) as usize]
    }
}

#[inline]
fn probability_to_threshold(p: f64) -> u64 {
    debug_assert!((0.0..1.0).contains(&p));
    // p < 1 so p * 2^64 < 2^64; the cast saturates correctly on the top end.
    (p * 18_446_744_073_709_551_616.0) as u64
}

//! Counter-based per-replication random streams.
//!
//! A stream is ChaCha8 keyed by the master seed with the replication index as
//! the 64-bit stream (nonce) selector. The output is a pure function of
//! `(master_seed, replication_index, counter)`, and distinct indices select
//! disjoint keystreams, so replications can run in any order or on any worker.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

// Fills the upper 24 key bytes so that a master seed of 0 is not the all-zero key.
const KEY_TAG: &[u8; 24] = b"prodlab/seed-stream/v1\0\0";

/// Source of standard normal variates.
pub trait GaussianSource {
    fn next_gaussian(&mut self) -> f64;
}

/// Deterministic random stream for one replication.
#[derive(Debug, Clone)]
pub struct SeedStream {
    master_seed: u64,
    replication_index: u64,
    rng: ChaCha8Rng,
}

/// Derives the stream for `replication_index` under `master_seed`.
pub fn derive_stream(master_seed: u64, replication_index: u64) -> SeedStream {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..].copy_from_slice(KEY_TAG);
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(replication_index);
    SeedStream {
        master_seed,
        replication_index,
        rng,
    }
}

impl SeedStream {
    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn replication_index(&self) -> u64 {
        self.replication_index
    }

    /// Position in the keystream, in 32-bit words.
    pub fn counter(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

impl GaussianSource for SeedStream {
    #[inline]
    fn next_gaussian(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

impl RngCore for SeedStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

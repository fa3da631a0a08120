//! Keyed random streams.
//!
//! Every random quantity in a simulation is addressed by a key
//! `(master seed, domain, index, sub-index)` that selects a ChaCha8 key, plus a
//! stream number and word position inside that key. Trials can therefore be
//! evaluated in any order, on any number of workers, and still see exactly the
//! same draws.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Separates independent uses of the same master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    /// Per-trial fading draws.
    Trial = 0,
    /// Network geometry.
    Topology = 1,
    /// Anything else a caller wants decorrelated from the others.
    Auxiliary = 2,
    /// Geometry redrawn for every trial.
    TrialTopology = 3,
}

/// A ChaCha8 generator whose key is derived from `(seed, domain, index, sub)`.
pub fn keyed_rng(seed: u64, domain: Domain, index: u64, sub: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    key[24..].copy_from_slice(&sub.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Uniform on `[0, 1)` with 53 random bits.
#[inline]
pub(crate) fn unit_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform on `(0, 1]`, safe to pass to `ln`.
#[inline]
pub(crate) fn open_unit_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    1.0 - unit_f64(rng)
}

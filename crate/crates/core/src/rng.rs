//! Deterministic seed derivation and uniform draws.
//!
//! Every Monte Carlo loop in this crate derives one RNG per trial from
//! `(master seed, stream, index)` so that results do not depend on how trials
//! are scheduled across workers. The derivation is a splitmix64 finalizer
//! chain, which is bit-stable and has full avalanche; trial RNGs are ChaCha8
//! streams, which `rand_chacha` documents as reproducible across releases.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed, a stream tag, and a trial index.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    mix(mix(mix(master) ^ stream) ^ index)
}

/// A fresh ChaCha8 stream for one (stream, index) cell.
pub fn trial_rng(master: u64, stream: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream, index))
}

/// Uniform draw on (0, 1]: exactly 2^53 equally likely values, never 0.
///
/// Used as an upper-tail quantile by inverse-transform samplers, where u = 1
/// must map to the support minimum and u = 0 would be out of domain.
pub fn unit_open_closed(rng: &mut dyn RngCore) -> f64 {
    (((rng.next_u64() >> 11) + 1) as f64) * (1.0 / 9007199254740992.0)
}

/// Uniform draw on [lo, hi).
pub fn uniform_in(rng: &mut dyn RngCore, lo: f64, hi: f64) -> f64 {
    let u = ((rng.next_u64() >> 11) as f64) * (1.0 / 9007199254740992.0);
    lo + u * (hi - lo)
}

/// Fair coin.
pub fn coin(rng: &mut dyn RngCore) -> bool {
    rng.next_u64() & 1 == 1
}

/// FNV-1a hash of a byte string; used to fingerprint configs in reports.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

//! Reproducible seeding.
//!
//! A [`Seed`] is a master value plus a stream index. The master keys a
//! ChaCha8 generator and the stream selects one of its independent
//! streams, so two seeds with the same master never overlap.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    pub master: u64,
    pub stream: u64,
}

impl Seed {
    pub const fn new(master: u64, stream: u64) -> Self {
        Self { master, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }

    /// Derives a child seed from labelled parts. Stable across platforms
    /// and releases since it only depends on SHA-256.
    pub fn derive(master: u64, parts: &[&[u8]]) -> Self {
        let mut h = Sha256::new();
        h.update(master.to_le_bytes());
        for p in parts {
            h.update((p.len() as u64).to_le_bytes());
            h.update(p);
        }
        let out = h.finalize();
        let a = u64::from_le_bytes(out[0..8].try_into().unwrap());
        let b = u64::from_le_bytes(out[8..16].try_into().unwrap());
        Self::new(a, b)
    }

    /// A 64-bit key mixing both halves, for counter-based hashing.
    pub fn key(&self) -> u64 {
        mix64(self.master ^ mix64(self.stream.wrapping_add(0x9e37_79b9_7f4a_7c15)))
    }
}

impl From<u64> for Seed {
    fn from(master: u64) -> Self {
        Self::new(master, 0)
    }
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform in [0, 1) from a key and a counter.
#[inline]
pub fn unit_from(key: u64, counter: u64) -> f64 {
    let bits = mix64(key ^ mix64(counter));
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_differ() {
        let a: u64 = Seed::new(7, 0).rng().gen();
        let b: u64 = Seed::new(7, 1).rng().gen();
        assert_ne!(a, b);
        let c: u64 = Seed::new(7, 0).rng().gen();
        assert_eq!(a, c);
    }

    #[test]
    fn derive_is_stable_and_part_sensitive() {
        let a = Seed::derive(1, &[b"x", b"yz"]);
        let b = Seed::derive(1, &[b"xy", b"z"]);
        assert_ne!(a, b);
        assert_eq!(a, Seed::derive(1, &[b"x", b"yz"]));
    }

    #[test]
    fn unit_range() {
        for i in 0..1000 {
            let u = unit_from(42, i);
            assert!((0.0..1.0).contains(&u));
        }
    }
}

//! Splittable counter-based random streams.
//!
//! A run seed is split into named sub-streams ("policy", "rewards", ...) so
//! that, e.g., swapping the policy cannot perturb the reward sequence. Each
//! stream is a keyed SplitMix64 counter: output depends only on
//! (seed, label, index, counter), which makes runs reproducible across
//! platforms and allows environments to draw round-addressed values.

use serde::{Deserialize, Serialize};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamRng {
    key: u64,
    ctr: u64,
}

impl StreamRng {
    /// Stream derived from `seed`, a stream label, and an index within the label.
    pub fn new(seed: u64, label: &str, index: u64) -> Self {
        let mut key = mix(seed ^ GOLDEN);
        for &b in label.as_bytes() {
            key = mix(key.rotate_left(8) ^ u64::from(b));
        }
        key = mix(key ^ index.wrapping_mul(GOLDEN));
        Self { key, ctr: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let v = mix(self.key.wrapping_add(self.ctr.wrapping_mul(GOLDEN)));
        self.ctr += 1;
        v
    }

    /// Uniform in [0, 1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Uniform index in 0..n. Modulo bias is negligible for desk-scale n.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_u64() % n as u64) as usize
    }
}

/// Stateless value addressed by (seed, label, address); used by oblivious
/// reward generators so round t's draw never depends on what was drawn before.
pub fn keyed_f64(seed: u64, label: &str, address: u64) -> f64 {
    StreamRng::new(seed, label, address).next_f64()
}

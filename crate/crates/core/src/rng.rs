//! Reproducible Gaussian streams.
//!
//! Uniforms come from ChaCha8, a counter-based generator: the key is expanded
//! from `seed` and `stream_id` selects one of 2^64 independent streams. Normals
//! are produced by Box–Muller, which depends on nothing but the uniform stream
//! and therefore reproduces bit-for-bit across platforms and runs.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::math;

/// A seed together with a substream selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngState {
    /// Master seed.
    pub seed: u64,
    /// Substream selector; distinct values give independent streams.
    pub stream_id: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RngState {
    /// Stream 0 of `seed`.
    pub const fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }

    /// Explicit `(seed, stream_id)` pair.
    pub const fn with_stream(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Derives the `index`-th child stream.
    ///
    /// Children are obtained by mixing, not by splitting a sequence, so a
    /// child's values never depend on how many siblings exist or who draws
    /// them.
    pub fn substream(&self, index: u64) -> Self {
        let mixed = splitmix64(self.stream_id ^ splitmix64(index ^ 0x5851_f42d_4c95_7f2d));
        Self {
            seed: self.seed,
            stream_id: mixed,
        }
    }

    /// Opens the Gaussian stream for this state.
    pub fn normals(&self) -> NormalStream {
        NormalStream::new(*self)
    }
}

/// Standard normal variates from a counter-based uniform stream.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    /// Positions a fresh stream at the start of `state`.
    pub fn new(state: RngState) -> Self {
        let mut key = [0u8; 32];
        let mut z = state.seed;
        for chunk in key.chunks_exact_mut(8) {
            z = splitmix64(z);
            chunk.copy_from_slice(&z.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(state.stream_id);
        Self { rng, spare: None }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal variate.
    #[inline]
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // 1 - U lies in (0, 1], so the logarithm is finite.
        let u1 = 1.0 - self.next_uniform();
        let u2 = self.next_uniform();
        let r = math::sqrt(-2.0 * math::ln(u1));
        let (s, c) = math::sin_cos(2.0 * math::PI * u2);
        self.spare = Some(r * s);
        r * c
    }

    /// Normal variate with the given standard deviation.
    #[inline]
    pub fn next_normal_scaled(&mut self, sd: f64) -> f64 {
        sd * self.next_normal()
    }
}

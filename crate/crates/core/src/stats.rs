//! Streaming mean and variance, and the Monte Carlo summary built from them.

/// Two-sided 99% standard normal quantile.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// Welford accumulator with Chan's pairwise merge.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl MeanAccumulator {
    /// Empty accumulator.
    pub const fn new() -> Self {
        Self {
            count: 0,
            mean: 0.0,
            m2: 0.0,
        }
    }

    /// Adds one observation.
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Folds another accumulator into this one.
    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        self.mean += delta * nb / n;
        self.m2 += other.m2 + delta * delta * na * nb / n;
        self.count += other.count;
    }

    /// Observations seen.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// Sample mean (0 when empty).
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; 0 with fewer than two observations.
    pub fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    /// Summary with a 99% normal-approximation interval clamped to
    /// `[lo, hi]`.
    pub fn summarize(&self, seed: u64, lo: f64, hi: f64) -> McEstimate {
        let samples = self.count;
        let stderr = if samples == 0 {
            0.0
        } else {
            libm::sqrt(self.sample_variance() / samples as f64)
        };
        let mean = self.mean.clamp(lo, hi);
        McEstimate {
            mean,
            stderr,
            ci_lo: (mean - Z_99 * stderr).max(lo),
            ci_hi: (mean + Z_99 * stderr).min(hi),
            samples,
            seed,
        }
    }
}

/// Monte Carlo mean with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// Sample mean.
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`.
    pub stderr: f64,
    /// Lower end of the 99% interval.
    pub ci_lo: f64,
    /// Upper end of the 99% interval.
    pub ci_hi: f64,
    /// Number of samples.
    pub samples: u64,
    /// Seed of the generating stream.
    pub seed: u64,
}

//! The critical-window limit `d / n^3 -> c`.
//!
//! The limiting distance is `E[(1 - exp(-1/(12c) - N1/(2 sqrt c) + N3/(6 sqrt c)))_+]`
//! where `(N1, N3)` is the Gaussian limit of `(sum mu_i, sum mu_i^3)` for the
//! GOE, with covariance `[[2, 6], [6, 24]]`. Writing `(N1, N3) = (Y, 3Y + Z)`
//! with independent `Y ~ N(0, 2)`, `Z ~ N(0, 6)` removes `Y` entirely and the
//! expectation reduces to `erf(1 / (4 sqrt(3c)))`.
//!
//! This module evaluates that limit three ways (closed form, quadrature of the
//! one-dimensional integral, Monte Carlo of the two-dimensional functional)
//! and estimates the finite-`n` covariance of the spectral pair.

use alloc::vec::Vec;

use crate::ensembles::sample_goe;
use crate::error::{invalid, Error, Result};
use crate::math::{self, PI};
use crate::plan::{self, run_sequential, BlockPlan};
use crate::quadrature::{integrate_below, Quadrature};
use crate::rng::RngState;
use crate::special::erf;
use crate::spectral::symmetric_eigenvalues;
use crate::stats::{McEstimate, MeanAccumulator};

/// The limiting ratio `c = lim d / n^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitParams {
    c: f64,
}

impl LimitParams {
    /// Requires `0 < c < inf`.
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain {
                function: "LimitParams",
                value: c,
            });
        }
        Ok(Self { c })
    }

    /// `c`.
    pub fn c(&self) -> f64 {
        self.c
    }
}

/// `erf(1 / (4 sqrt 3 sqrt c))`.
pub fn limiting_tv_closed_form(p: LimitParams) -> f64 {
    erf(1.0 / (4.0 * math::sqrt(3.0) * math::sqrt(p.c)))
}

/// `1 / (2 sqrt(3 pi) sqrt c)`, the large-`c` behaviour of the closed form.
pub fn asymptotic_tail(p: LimitParams) -> f64 {
    1.0 / (2.0 * math::sqrt(3.0 * PI) * math::sqrt(p.c))
}

/// Absolute tolerance used by [`limiting_tv_quadrature`].
pub const QUADRATURE_TOL: f64 = 1e-12;

/// The limit as `int_{-inf}^{1/(2 sqrt c)} (1 - exp(-1/(12c) + z/(6 sqrt c))) phi_6(z) dz`
/// with `phi_6` the `N(0, 6)` density. The upper limit is where the bracket
/// changes sign.
pub fn limiting_tv_quadrature(p: LimitParams) -> Result<Quadrature> {
    let rc = math::sqrt(p.c);
    let shift = -1.0 / (12.0 * p.c);
    let norm = 1.0 / math::sqrt(12.0 * PI);
    integrate_below(
        |z| -math::exp_m1(shift + z / (6.0 * rc)) * norm * math::exp(-z * z / 12.0),
        1.0 / (2.0 * rc),
        math::sqrt(12.0),
        QUADRATURE_TOL,
    )
}

/// The functional `(1 - exp(-1/(12c) - n1/(2 sqrt c) + n3/(6 sqrt c)))_+`.
pub fn limit_functional(p: LimitParams, pair: CltPair) -> f64 {
    let rc = math::sqrt(p.c);
    let exponent = -1.0 / (12.0 * p.c) - pair.n1 / (2.0 * rc) + pair.n3 / (6.0 * rc);
    if exponent >= 0.0 {
        0.0
    } else {
        -math::exp_m1(exponent)
    }
}

/// How the Gaussian pair is generated in [`LimitMcPlan`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSampler {
    /// `(Y, 3Y + Z)` with independent `Y ~ N(0, 2)`, `Z ~ N(0, 6)`.
    Decoupled,
    /// Cholesky factor of the limiting covariance applied to two standard
    /// normals.
    Cholesky,
}

/// Limiting covariance of `(sum mu_i, sum mu_i^3)`.
pub const LIMIT_COVARIANCE: CovMatrix2 = CovMatrix2 {
    c11: 2.0,
    c12: 6.0,
    c22: 24.0,
};

/// Monte Carlo job for the limiting functional.
#[derive(Debug, Clone, Copy)]
pub struct LimitMcPlan {
    params: LimitParams,
    samples: u64,
    rng: RngState,
    sampler: PairSampler,
}

impl LimitMcPlan {
    /// Requires `samples >= 1`.
    pub fn new(
        params: LimitParams,
        samples: u64,
        rng: RngState,
        sampler: PairSampler,
    ) -> Result<Self> {
        if samples == 0 {
            return Err(invalid("samples must be at least 1"));
        }
        Ok(Self {
            params,
            samples,
            rng,
            sampler,
        })
    }
}

impl BlockPlan for LimitMcPlan {
    type Partial = MeanAccumulator;
    type Output = McEstimate;

    fn block_count(&self) -> u64 {
        plan::block_count(self.samples)
    }

    fn run_block(&self, block: u64) -> Result<MeanAccumulator> {
        let mut normals = self.rng.substream(block).normals();
        let chol = LIMIT_COVARIANCE
            .cholesky()
            .expect("limit covariance is positive definite");
        let mut acc = MeanAccumulator::new();
        for _ in plan::block_range(self.samples, block) {
            let pair = match self.sampler {
                PairSampler::Decoupled => {
                    let y = normals.next_normal_scaled(math::sqrt(2.0));
                    let z = normals.next_normal_scaled(math::sqrt(6.0));
                    CltPair {
                        n1: y,
                        n3: 3.0 * y + z,
                    }
                }
                PairSampler::Cholesky => {
                    let g1 = normals.next_normal();
                    let g2 = normals.next_normal();
                    CltPair {
                        n1: chol[0] * g1,
                        n3: chol[1] * g1 + chol[2] * g2,
                    }
                }
            };
            acc.push(limit_functional(self.params, pair));
        }
        Ok(acc)
    }

    fn finish(&self, partials: Vec<MeanAccumulator>) -> McEstimate {
        let mut total = MeanAccumulator::new();
        for p in &partials {
            total.merge(p);
        }
        total.summarize(self.rng.seed, 0.0, 1.0)
    }
}

/// Monte Carlo average of the limiting functional over `(Y, 3Y + Z)`.
pub fn limiting_tv_mc(p: LimitParams, samples: u64, rng: RngState) -> Result<McEstimate> {
    run_sequential(&LimitMcPlan::new(p, samples, rng, PairSampler::Decoupled)?)
}

/// Deterministic parts and Gaussian coefficients of the limit of
/// `(S0, S1, S2, S3, S4)`: `S1 -> s1_coeff * N1`, `S3 -> s3_coeff * N3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SLimit {
    /// `-1/(12c)`
    pub s0: f64,
    /// `-1/(2 sqrt c)`
    pub s1_coeff: f64,
    /// `1/(4c)`
    pub s2: f64,
    /// `1/(6 sqrt c)`
    pub s3_coeff: f64,
    /// `-1/(4c)`
    pub s4: f64,
}

/// Limit of the five statistics in the window `d / n^3 -> c`.
pub fn s_limit_vector(p: LimitParams) -> SLimit {
    let c = p.c;
    let rc = math::sqrt(c);
    SLimit {
        s0: -1.0 / (12.0 * c),
        s1_coeff: -1.0 / (2.0 * rc),
        s2: 1.0 / (4.0 * c),
        s3_coeff: 1.0 / (6.0 * rc),
        s4: -1.0 / (4.0 * c),
    }
}

/// `(sum mu_i, sum mu_i^3)` for one matrix, or a draw of its Gaussian limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltPair {
    /// First power sum.
    pub n1: f64,
    /// Third power sum.
    pub n3: f64,
}

/// Symmetric 2x2 covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovMatrix2 {
    /// `Var(first)`
    pub c11: f64,
    /// `Cov(first, second)`
    pub c12: f64,
    /// `Var(second)`
    pub c22: f64,
}

impl CovMatrix2 {
    /// Unbiased sample covariance (two-pass); needs two or more pairs.
    pub fn from_pairs(pairs: &[CltPair]) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(invalid("covariance needs at least two samples"));
        }
        let (m1, m3) = pair_means(pairs);
        let mut c = CovMatrix2 {
            c11: 0.0,
            c12: 0.0,
            c22: 0.0,
        };
        for p in pairs {
            let (a, b) = (p.n1 - m1, p.n3 - m3);
            c.c11 += a * a;
            c.c12 += a * b;
            c.c22 += b * b;
        }
        let k = (pairs.len() - 1) as f64;
        Ok(CovMatrix2 {
            c11: c.c11 / k,
            c12: c.c12 / k,
            c22: c.c22 / k,
        })
    }

    /// `c11 >= 0`, `c22 >= 0` and non-negative determinant.
    pub fn is_psd(&self) -> bool {
        self.c11 >= 0.0 && self.c22 >= 0.0 && self.c11 * self.c22 - self.c12 * self.c12 >= 0.0
    }

    /// Lower Cholesky factor `[l11, l21, l22]`, if positive definite.
    pub fn cholesky(&self) -> Option<[f64; 3]> {
        if self.c11.is_nan() || self.c11 <= 0.0 {
            return None;
        }
        let l11 = math::sqrt(self.c11);
        let l21 = self.c12 / l11;
        let rest = self.c22 - l21 * l21;
        if rest.is_nan() || rest <= 0.0 {
            return None;
        }
        Some([l11, l21, math::sqrt(rest)])
    }
}

/// Sample means of both coordinates.
pub fn pair_means(pairs: &[CltPair]) -> (f64, f64) {
    let k = pairs.len().max(1) as f64;
    let m1 = math::sum_compensated(pairs.iter().map(|p| p.n1)) / k;
    let m3 = math::sum_compensated(pairs.iter().map(|p| p.n3)) / k;
    (m1, m3)
}

/// Power sums of the spectrum of `M(n) / sqrt(n)` for one GOE draw.
pub fn clt_pair(n: usize, rng: &RngState) -> Result<CltPair> {
    let m = sample_goe(n, rng)?.scaled(1.0 / math::sqrt(n as f64));
    let s = symmetric_eigenvalues(&m)?;
    Ok(CltPair {
        n1: math::sum_compensated(s.values().iter().copied()),
        n3: math::sum_compensated(s.values().iter().map(|&x| x * x * x)),
    })
}

/// Replicates per block in a [`CltPlan`].
pub const CLT_BLOCK: u64 = 8;

/// `reps` independent GOE draws of order `n`; replicate `r` uses substream `r`.
#[derive(Debug, Clone, Copy)]
pub struct CltPlan {
    n: usize,
    reps: u64,
    rng: RngState,
}

impl CltPlan {
    /// Requires `n >= 2` and `reps >= 2`.
    pub fn new(n: usize, reps: u64, rng: RngState) -> Result<Self> {
        if n < 2 || reps < 2 {
            return Err(invalid("covariance estimation needs n >= 2 and reps >= 2"));
        }
        Ok(Self { n, reps, rng })
    }
}

impl BlockPlan for CltPlan {
    type Partial = Vec<CltPair>;
    type Output = Vec<CltPair>;

    fn block_count(&self) -> u64 {
        self.reps.div_ceil(CLT_BLOCK)
    }

    fn run_block(&self, block: u64) -> Result<Vec<CltPair>> {
        let start = block * CLT_BLOCK;
        (start..(start + CLT_BLOCK).min(self.reps))
            .map(|r| clt_pair(self.n, &self.rng.substream(r)))
            .collect()
    }

    fn finish(&self, partials: Vec<Vec<CltPair>>) -> Vec<CltPair> {
        partials.into_iter().flatten().collect()
    }
}

/// All replicate pairs, in replicate order.
pub fn clt_samples(n: usize, reps: u64, rng: RngState) -> Result<Vec<CltPair>> {
    run_sequential(&CltPlan::new(n, reps, rng)?)
}

/// Empirical covariance of `(sum mu_i, sum mu_i^3)` over `reps` GOE draws.
pub fn clt_covariance_estimate(n: usize, reps: u64, rng: RngState) -> Result<CovMatrix2> {
    CovMatrix2::from_pairs(&clt_samples(n, reps, rng)?)
}

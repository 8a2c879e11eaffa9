//! Monte Carlo estimation of `TV(W(n, d), M(n, d))`.
//!
//! From the GOE side, `TV = E_M[(1 - f/g)_+]` with `f` set to zero off the PSD
//! cone; from the Wishart side, `TV = E_W[(1 - g/f)_+]`. Both integrands are
//! evaluated exactly through `alpha = ln(f/g)` on every draw, without
//! restricting to the high-probability eigenvalue window, so the estimators
//! are unbiased at every finite `n`.

use alloc::vec::Vec;

use crate::densities::{tol_psd, AlphaBreakdown, AlphaEvaluator};
use crate::ensembles::{sample_shifted_goe_from, sample_wishart_from, EnsembleParams};
use crate::error::{invalid, Result};
use crate::math;
use crate::plan::{self, run_sequential, BlockPlan, BLOCK_SIZE};
use crate::rng::{NormalStream, RngState};
use crate::spectral::{symmetric_eigenvalues, Spectrum};
use crate::stats::MeanAccumulator;

/// Which ensemble the draws come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Draws from `M(n, d)`; integrand `(1 - e^alpha)_+`.
    Goe,
    /// Draws from `W(n, d)`; integrand `(1 - e^-alpha)_+`.
    Wishart,
}

impl Side {
    /// Stable lowercase name.
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Goe => "goe_side",
            Side::Wishart => "wishart_side",
        }
    }
}

/// `(1 - e^alpha)_+` on the GOE side, `(1 - e^-alpha)_+` on the Wishart side.
/// Draws outside the PSD cone contribute 1 on the GOE side.
#[inline]
pub fn integrand(side: Side, alpha: f64, psd: bool) -> f64 {
    match side {
        Side::Goe if !psd => 1.0,
        Side::Goe if alpha >= 0.0 => 0.0,
        Side::Goe => -math::exp_m1(alpha),
        Side::Wishart if alpha <= 0.0 => 0.0,
        Side::Wishart => -math::exp_m1(-alpha),
    }
}

/// Estimate of the total variation distance at one `(n, d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvEstimate {
    /// Sample mean of the integrand.
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)`.
    pub stderr: f64,
    /// 99% interval, clamped to `[0, 1]`.
    pub ci_lo: f64,
    /// See `ci_lo`.
    pub ci_hi: f64,
    /// Number of draws.
    pub samples: u64,
    /// Sampling side.
    pub side: Side,
    /// Master seed.
    pub seed: u64,
    /// Matrix order.
    pub n: usize,
    /// Degrees of freedom.
    pub d: u64,
    /// Fraction of draws whose spectrum lies in the `3 sqrt(dn)` window.
    pub frac_in_q: f64,
    /// Fraction of draws that are positive semidefinite.
    pub frac_psd: f64,
}

/// Per-block partial of a [`TvPlan`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TvPartial {
    acc: MeanAccumulator,
    in_q: u64,
    psd: u64,
}

impl TvPartial {
    fn record(&mut self, value: f64, in_q: bool, psd: bool) {
        self.acc.push(value);
        self.in_q += u64::from(in_q);
        self.psd += u64::from(psd);
    }

    fn merge(&mut self, other: &Self) {
        self.acc.merge(&other.acc);
        self.in_q += other.in_q;
        self.psd += other.psd;
    }
}

/// One Monte Carlo draw as seen by the profiler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRecord {
    /// Global sample index.
    pub index: u64,
    /// Log-ratio and its decomposition at the drawn matrix.
    pub breakdown: AlphaBreakdown,
    /// Integrand value in `[0, 1]`.
    pub integrand: f64,
}

/// A TV estimation job.
#[derive(Debug, Clone, Copy)]
pub struct TvPlan {
    params: EnsembleParams,
    side: Side,
    samples: u64,
    rng: RngState,
    evaluator: AlphaEvaluator,
}

impl TvPlan {
    /// Validates `1 <= n <= d` and `samples >= 1`.
    pub fn new(n: usize, d: u64, samples: u64, side: Side, rng: RngState) -> Result<Self> {
        let params = EnsembleParams::with_density(n, d)?;
        if samples == 0 {
            return Err(invalid("samples must be at least 1"));
        }
        Ok(Self {
            params,
            side,
            samples,
            rng,
            evaluator: AlphaEvaluator::new(n, d)?,
        })
    }

    /// Number of draws.
    pub fn samples(&self) -> u64 {
        self.samples
    }

    fn draw_spectrum(&self, normals: &mut NormalStream) -> Result<Spectrum> {
        let m = match self.side {
            Side::Goe => sample_shifted_goe_from(self.params, normals)?,
            Side::Wishart => sample_wishart_from(self.params, normals)?,
        };
        symmetric_eigenvalues(&m)
    }

    fn draw(&self, normals: &mut NormalStream) -> Result<(f64, bool, bool)> {
        let s = self.draw_spectrum(normals)?;
        let alpha = self.evaluator.alpha(&s)?;
        let psd = s.min() >= -tol_psd(self.params.d);
        let in_q = crate::densities::in_q(&s, self.params.d);
        Ok((integrand(self.side, alpha, psd), in_q, psd))
    }

    fn draw_profile(&self, normals: &mut NormalStream, index: u64) -> Result<ProfileRecord> {
        let s = self.draw_spectrum(normals)?;
        let breakdown = self.evaluator.breakdown(&s)?;
        Ok(ProfileRecord {
            index,
            breakdown,
            integrand: integrand(self.side, breakdown.alpha_exact, breakdown.psd),
        })
    }

    fn estimate(&self, total: &TvPartial) -> TvEstimate {
        let e = total.acc.summarize(self.rng.seed, 0.0, 1.0);
        let count = total.acc.count().max(1) as f64;
        TvEstimate {
            mean: e.mean,
            stderr: e.stderr,
            ci_lo: e.ci_lo,
            ci_hi: e.ci_hi,
            samples: e.samples,
            side: self.side,
            seed: self.rng.seed,
            n: self.params.n,
            d: self.params.d,
            frac_in_q: total.in_q as f64 / count,
            frac_psd: total.psd as f64 / count,
        }
    }

    /// Per-draw records in sample order, from the same streams as the
    /// estimate.
    pub fn profile(&self) -> TvProfile {
        TvProfile {
            plan: *self,
            next: 0,
            normals: None,
        }
    }
}

impl BlockPlan for TvPlan {
    type Partial = TvPartial;
    type Output = TvEstimate;

    fn block_count(&self) -> u64 {
        plan::block_count(self.samples)
    }

    fn run_block(&self, block: u64) -> Result<TvPartial> {
        let mut normals = self.rng.substream(block).normals();
        let mut partial = TvPartial::default();
        for _ in plan::block_range(self.samples, block) {
            let (value, in_q, psd) = self.draw(&mut normals)?;
            partial.record(value, in_q, psd);
        }
        Ok(partial)
    }

    fn finish(&self, partials: Vec<TvPartial>) -> TvEstimate {
        let mut total = TvPartial::default();
        for p in &partials {
            total.merge(p);
        }
        self.estimate(&total)
    }
}

/// Iterator over [`ProfileRecord`]s.
#[derive(Debug, Clone)]
pub struct TvProfile {
    plan: TvPlan,
    next: u64,
    normals: Option<NormalStream>,
}

impl Iterator for TvProfile {
    type Item = Result<ProfileRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.plan.samples {
            return None;
        }
        let index = self.next;
        if index.is_multiple_of(BLOCK_SIZE) {
            self.normals = Some(self.plan.rng.substream(index / BLOCK_SIZE).normals());
        }
        let normals = self.normals.as_mut().expect("stream opened at block start");
        self.next += 1;
        Some(self.plan.draw_profile(normals, index))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.plan.samples - self.next) as usize;
        (left, Some(left))
    }
}

/// Rebuilds the estimate from profile records, merging per block exactly as
/// the estimator does.
pub fn summarize_profile<I>(plan: &TvPlan, records: I) -> TvEstimate
where
    I: IntoIterator<Item = ProfileRecord>,
{
    let mut total = TvPartial::default();
    let mut block = TvPartial::default();
    let mut current = 0;
    for r in records {
        let b = r.index / BLOCK_SIZE;
        if b != current {
            total.merge(&block);
            block = TvPartial::default();
            current = b;
        }
        block.record(r.integrand, r.breakdown.in_q, r.breakdown.psd);
    }
    total.merge(&block);
    plan.estimate(&total)
}

/// TV estimate from draws of `M(n, d)`.
pub fn tv_estimate_goe_side(n: usize, d: u64, samples: u64, rng: RngState) -> Result<TvEstimate> {
    run_sequential(&TvPlan::new(n, d, samples, Side::Goe, rng)?)
}

/// TV estimate from draws of `W(n, d)`.
pub fn tv_estimate_wishart_side(
    n: usize,
    d: u64,
    samples: u64,
    rng: RngState,
) -> Result<TvEstimate> {
    run_sequential(&TvPlan::new(n, d, samples, Side::Wishart, rng)?)
}

/// Per-draw diagnostics on the GOE side.
pub fn tv_profile(n: usize, d: u64, samples: u64, rng: RngState) -> Result<TvProfile> {
    Ok(TvPlan::new(n, d, samples, Side::Goe, rng)?.profile())
}

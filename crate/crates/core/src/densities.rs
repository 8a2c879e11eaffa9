//! Exact Wishart and GOE log-densities as functions of the spectrum, their
//! log-ratio `alpha`, and its split into centered power-sum statistics.
//!
//! With `h(x) = ((d-n-1) ln(x/d) - (x-d) + (x-d)^2/(2d)) / 2` the log-ratio is
//! `alpha = sum_i h(lambda_i) + K(n, d)`, where `K` gathers every term that does
//! not depend on the spectrum. Expanding `h` to fourth order around `d` gives
//! `alpha = S0 + S1 + S2 + S3 + S4 + remainder` with `S0 = -n^3/(12 d)` and
//! `Sk` proportional to `sum_i (lambda_i - d)^k`.

use alloc::format;

use crate::error::{invalid, Result};
use crate::math::{self, CompensatedSum, LN_2, PI};
use crate::special::{log_gamma, stirling_remainder};
use crate::spectral::{centered_power_sums, Spectrum};

/// Eigenvalues above `-tol_psd(d)` count as non-negative (and negative ones in
/// that band are read as zero).
pub fn tol_psd(d: u64) -> f64 {
    1e-8 * d as f64
}

fn check_wishart_params(n: usize, d: u64) -> Result<()> {
    if d < n as u64 {
        return Err(invalid(format!(
            "the Wishart density needs d >= n (got n = {n}, d = {d})"
        )));
    }
    Ok(())
}

/// Clamped eigenvalue, or `None` when the spectrum leaves the PSD cone.
fn clamp_psd(lambda: f64, d: u64) -> Option<f64> {
    if lambda >= 0.0 {
        Some(lambda)
    } else if lambda >= -tol_psd(d) {
        Some(0.0)
    } else {
        None
    }
}

/// `c * ln(x)` with the convention `0 * ln 0 = 0`.
fn scaled_ln(c: f64, x: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * math::ln(x)
    }
}

/// Log-density of `W(n, d)` at a matrix with spectrum `s`; `-inf` off the PSD
/// cone.
pub fn log_wishart_density(s: &Spectrum, d: u64) -> Result<f64> {
    let n = s.len();
    check_wishart_params(n, d)?;
    if clamp_psd(s.min(), d).is_none() {
        return Ok(f64::NEG_INFINITY);
    }
    let (nf, df) = (n as f64, d as f64);
    let coef = 0.5 * (df - nf - 1.0);
    let mut acc = CompensatedSum::new();
    for &lambda in s.values() {
        let lambda = clamp_psd(lambda, d).unwrap_or(0.0);
        acc.add(scaled_ln(coef, lambda));
        acc.add(-0.5 * lambda);
    }
    acc.add(-0.5 * df * nf * LN_2);
    acc.add(-0.25 * nf * (nf - 1.0) * math::ln(PI));
    for i in 1..=n {
        acc.add(-log_gamma(0.5 * (df + 1.0 - i as f64))?);
    }
    Ok(acc.value())
}

/// Log-density of `M(n, d) = sqrt(d) M(n) + d I` at a matrix with spectrum `s`.
pub fn log_goe_density(s: &Spectrum, d: u64) -> Result<f64> {
    if d == 0 {
        return Err(invalid("d must be at least 1"));
    }
    let (nf, df) = (s.len() as f64, d as f64);
    let mut acc = CompensatedSum::new();
    for &lambda in s.values() {
        let x = lambda - df;
        acc.add(-x * x / (4.0 * df));
    }
    acc.add(-0.25 * nf * (nf + 1.0) * math::ln(2.0 * PI * df));
    acc.add(-0.5 * nf * LN_2);
    Ok(acc.value())
}

/// `h(x)` evaluated through `ln_1p` of the relative offset `(x - d)/d`.
pub fn h(x: f64, n: usize, d: u64) -> f64 {
    let df = d as f64;
    let y = x - df;
    let coef = df - n as f64 - 1.0;
    let log_term = if coef == 0.0 {
        0.0
    } else {
        coef * math::ln_1p(y / df)
    };
    0.5 * (log_term - y + y * y / (2.0 * df))
}

/// The spectrum-independent part `K(n, d)` of the log-ratio.
///
/// Each index contributes
/// `-((d-i)/2) ln(1 - (i-1)/d) + (1-i)/2 - r((d+1-i)/2)` with `r` the Stirling
/// remainder of `log Γ`. The large `ln d` and `ln 2` multiples of the raw
/// constants cancel exactly across the sum and are never formed, so every
/// term is O(n/d) and no digits are lost.
pub fn log_ratio_constant(n: usize, d: u64) -> Result<f64> {
    check_wishart_params(n, d)?;
    let df = d as f64;
    let mut acc = CompensatedSum::new();
    for i in 1..=n {
        let fi = i as f64;
        acc.add(-0.5 * (df - fi) * math::ln_1p((1.0 - fi) / df));
        acc.add(0.5 * (1.0 - fi));
        acc.add(-stirling_remainder(0.5 * (df + 1.0 - fi))?);
    }
    Ok(acc.value())
}

/// `S0 = -n^3 / (12 d)`.
pub fn s0(n: usize, d: u64) -> f64 {
    let nf = n as f64;
    -nf * nf * nf / (12.0 * d as f64)
}

/// True iff every eigenvalue lies in `[d - 3 sqrt(d n), d + 3 sqrt(d n)]`.
pub fn in_q(s: &Spectrum, d: u64) -> bool {
    let df = d as f64;
    let half = 3.0 * math::sqrt(df * s.len() as f64);
    s.min() >= df - half && s.max() <= df + half
}

/// Derivatives of `h` at `d` and the worst-case fifth-order Taylor term over
/// the window `|x - d| <= 3 sqrt(d n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorCoeffs {
    /// `h'(d) = -(n+1)/(2d)`
    pub h1: f64,
    /// `h''(d) = (n+1)/(2d^2)`
    pub h2: f64,
    /// `h'''(d) = (d-n-1)/d^3`
    pub h3: f64,
    /// `h''''(d) = -3(d-n-1)/d^4`
    pub h4: f64,
    /// `(d-n-1) (3 sqrt(dn))^5 / (10 (d - 3 sqrt(dn))^5)`
    pub remainder_bound: f64,
}

/// Taylor data for `h`; needs `d > 9 n` so the window stays inside `x > 0`.
pub fn taylor_coeffs(n: usize, d: u64) -> Result<TaylorCoeffs> {
    if n == 0 || d <= 9 * n as u64 {
        return Err(invalid(format!(
            "Taylor window needs n >= 1 and d > 9n (got n = {n}, d = {d})"
        )));
    }
    let (nf, df) = (n as f64, d as f64);
    let a = df - nf - 1.0;
    let w = 3.0 * math::sqrt(df * nf);
    Ok(TaylorCoeffs {
        h1: -(nf + 1.0) / (2.0 * df),
        h2: (nf + 1.0) / (2.0 * df * df),
        h3: a / (df * df * df),
        h4: -3.0 * a / (df * df * df * df),
        remainder_bound: a / 10.0 * math::powi(w / (df - w), 5),
    })
}

/// The five statistics and what is left of `alpha` after them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct STerms {
    /// `-n^3 / (12 d)`
    pub s0: f64,
    /// `-((n+1)/(2d)) sum (lambda - d)`
    pub s1: f64,
    /// `((n+1)/(4d^2)) sum (lambda - d)^2`
    pub s2: f64,
    /// `((d-n-1)/(6d^3)) sum (lambda - d)^3`
    pub s3: f64,
    /// `-((d-n-1)/(8d^4)) sum (lambda - d)^4`
    pub s4: f64,
    /// `alpha - (s0 + s1 + s2 + s3 + s4)`
    pub remainder: f64,
}

impl STerms {
    /// `s0 + s1 + s2 + s3 + s4`.
    pub fn sum(&self) -> f64 {
        math::sum_compensated([self.s0, self.s1, self.s2, self.s3, self.s4])
    }
}

/// Log-ratio at one spectrum with its decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaBreakdown {
    /// `ln(f / g)`; `-inf` where the Wishart density vanishes.
    pub alpha_exact: f64,
    /// Present only when `alpha_exact` is finite.
    pub terms: Option<STerms>,
    /// Spectrum inside the `3 sqrt(d n)` window around `d`.
    pub in_q: bool,
    /// Smallest eigenvalue at least `-tol_psd(d)`.
    pub psd: bool,
}

/// Evaluates the log-ratio for a fixed `(n, d)`, holding `K(n, d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaEvaluator {
    n: usize,
    d: u64,
    constant: f64,
}

impl AlphaEvaluator {
    /// Precomputes `K(n, d)`. Requires `1 <= n <= d`.
    pub fn new(n: usize, d: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("matrix order n must be at least 1"));
        }
        Ok(Self {
            n,
            d,
            constant: log_ratio_constant(n, d)?,
        })
    }

    /// Matrix order.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Degrees of freedom.
    pub fn d(&self) -> u64 {
        self.d
    }

    /// `K(n, d)`.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    fn check(&self, s: &Spectrum) -> Result<()> {
        if s.len() != self.n {
            return Err(invalid(format!(
                "spectrum has {} eigenvalues, evaluator expects {}",
                s.len(),
                self.n
            )));
        }
        Ok(())
    }

    /// `alpha = sum_i h(lambda_i) + K`; `-inf` off the PSD cone.
    pub fn alpha(&self, s: &Spectrum) -> Result<f64> {
        self.check(s)?;
        if clamp_psd(s.min(), self.d).is_none() {
            return Ok(f64::NEG_INFINITY);
        }
        let mut acc = CompensatedSum::new();
        for &lambda in s.values() {
            acc.add(h(clamp_psd(lambda, self.d).unwrap_or(0.0), self.n, self.d));
        }
        acc.add(self.constant);
        Ok(acc.value())
    }

    /// `alpha` together with `S0..S4`, the remainder and the window flags.
    pub fn breakdown(&self, s: &Spectrum) -> Result<AlphaBreakdown> {
        let alpha = self.alpha(s)?;
        let psd = s.min() >= -tol_psd(self.d);
        let window = in_q(s, self.d);
        let terms = if alpha.is_finite() {
            let (nf, df) = (self.n as f64, self.d as f64);
            let sums = centered_power_sums(s, df, 4);
            let a = df - nf - 1.0;
            let mut t = STerms {
                s0: s0(self.n, self.d),
                s1: -(nf + 1.0) / (2.0 * df) * sums[0],
                s2: (nf + 1.0) / (4.0 * df * df) * sums[1],
                s3: a / (6.0 * df * df * df) * sums[2],
                s4: -a / (8.0 * df * df * df * df) * sums[3],
                remainder: 0.0,
            };
            t.remainder = alpha - t.sum();
            Some(t)
        } else {
            None
        };
        Ok(AlphaBreakdown {
            alpha_exact: alpha,
            terms,
            in_q: window,
            psd,
        })
    }
}

/// `ln(f/g)` in the centered form `sum h + K`.
pub fn alpha_exact(s: &Spectrum, d: u64) -> Result<f64> {
    AlphaEvaluator::new(s.len(), d)?.alpha(s)
}

/// `ln f - ln g` by direct subtraction of the two log-densities.
pub fn alpha_direct(s: &Spectrum, d: u64) -> Result<f64> {
    let f = log_wishart_density(s, d)?;
    if f == f64::NEG_INFINITY {
        return Ok(f);
    }
    Ok(f - log_goe_density(s, d)?)
}

/// Full decomposition of `alpha` at one spectrum.
pub fn s_decomposition(s: &Spectrum, d: u64) -> Result<AlphaBreakdown> {
    AlphaEvaluator::new(s.len(), d)?.breakdown(s)
}

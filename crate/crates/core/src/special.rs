//! `log Γ`, its Stirling remainder, and the error function.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::math::{self, PI};

/// Boundary between the Lanczos and Stirling branches of [`log_gamma`].
pub const STIRLING_CUTOFF: f64 = 15.0;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// Lanczos, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

// B_{2k} / (2k (2k-1)) for k = 1..6
const STIRLING: [f64; 6] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
];

fn lanczos_log_gamma(z: f64) -> f64 {
    // z >= 0.5
    let x = z - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    HALF_LN_2PI + (x + 0.5) * math::ln(t) - t + math::ln(a)
}

/// Leading Stirling terms `(z - 1/2) ln z - z + ln(2 pi)/2`.
pub fn stirling_leading(z: f64) -> f64 {
    let (p, e) = scaled_log(z);
    p - z + (HALF_LN_2PI + e)
}

/// `(z - 1/2) ln z` as an unevaluated sum `p + e`.
fn scaled_log(z: f64) -> (f64, f64) {
    let l = math::ln(z);
    let p = (z - 0.5) * l;
    (p, libm::fma(z - 0.5, l, -p))
}

fn stirling_series(z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in STIRLING.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

/// `log Γ(z) - stirling_leading(z)`, accurate without cancellation for large
/// `z` (where it is about `1/(12 z)`).
pub fn stirling_remainder(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain {
            function: "stirling_remainder",
            value: z,
        });
    }
    if z >= STIRLING_CUTOFF {
        Ok(stirling_series(z))
    } else {
        Ok(log_gamma(z)? - stirling_leading(z))
    }
}

/// Natural logarithm of the gamma function for `z > 0`.
///
/// Lanczos below [`STIRLING_CUTOFF`], Stirling series with six Bernoulli
/// terms above. Reflection covers `0 < z < 1/2`.
pub fn log_gamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain {
            function: "log_gamma",
            value: z,
        });
    }
    Ok(if z >= STIRLING_CUTOFF {
        let (p, e) = scaled_log(z);
        p - z + (HALF_LN_2PI + stirling_series(z) + e)
    } else if z >= 0.5 {
        lanczos_log_gamma(z)
    } else {
        math::ln(PI / math::sin(PI * z)) - lanczos_log_gamma(1.0 - z)
    })
}

const FRAC_2_SQRT_PI: f64 = core::f64::consts::FRAC_2_SQRT_PI;

/// Error function `(2/sqrt(pi)) int_0^x exp(-t^2) dt`.
///
/// Uses the positive series `exp(-x^2) sum 2^k x^(2k+1) / (2k+1)!!` for
/// `|x| < 2` and the continued fraction for `erfc` beyond.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    let ax = x.abs();
    let v = if ax < 2.0 {
        erf_series(ax)
    } else {
        1.0 - erfc_continued_fraction(ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

/// Complementary error function `1 - erf(x)`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return x;
    }
    if x >= 2.0 {
        erfc_continued_fraction(x)
    } else if x <= -2.0 {
        2.0 - erfc_continued_fraction(-x)
    } else {
        1.0 - erf(x)
    }
}

fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    while term > sum * 1e-17 {
        k += 1.0;
        term *= 2.0 * x2 / (2.0 * k + 1.0);
        sum += term;
    }
    FRAC_2_SQRT_PI * math::exp(-x2) * sum
}

// erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
// evaluated with the modified Lentz method, x >= 2.
fn erfc_continued_fraction(x: f64) -> f64 {
    if x > 27.3 {
        return 0.0;
    }
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        d = if d == 0.0 { TINY } else { d };
        c = x + a / c;
        c = if c == 0.0 { TINY } else { c };
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    0.5 * FRAC_2_SQRT_PI * math::exp(-x * x) / f
}

//! Symmetric eigenvalues and the spectral statistics built on them.
//!
//! Eigenvalues come from a Householder reduction to tridiagonal form followed
//! by the implicit QL iteration with Wilkinson shifts. No eigenvectors are
//! formed.

use alloc::vec;
use alloc::vec::Vec;

use crate::ensembles::SymmetricMatrix;
use crate::error::{invalid, Error, Result};
use crate::math::{self, CompensatedSum};

/// QL sweeps allowed per eigenvalue.
pub const MAX_QL_SWEEPS: usize = 30;

/// Eigenvalues sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// Sorts `values` ascending. Rejects empty or non-finite input.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("a spectrum needs at least one eigenvalue"));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(invalid("non-finite eigenvalue"));
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self {
            eigenvalues: values,
        })
    }

    /// Order of the underlying matrix.
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Always false; a spectrum has at least one value.
    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Ascending eigenvalues.
    pub fn values(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Smallest eigenvalue.
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Largest eigenvalue.
    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// Compensated sum of the eigenvalues.
    pub fn sum(&self) -> f64 {
        math::sum_compensated(self.eigenvalues.iter().copied())
    }
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &SymmetricMatrix) -> Result<Spectrum> {
    let n = a.order();
    if n == 0 {
        return Err(invalid("cannot solve an empty matrix"));
    }
    let mut dense = a.to_dense();
    let (mut diag, mut off) = tridiagonalize(&mut dense, n);
    tridiagonal_ql(&mut diag, &mut off)?;
    Spectrum::from_values(diag)
}

/// Householder reduction of the dense row-major symmetric `a` (destroyed).
/// Returns the diagonal and the subdiagonal (`off[k]` couples `k` and `k+1`;
/// the last slot is zero).
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        diag[k] = a[k * n + k];
        let m = n - k - 1;
        let x = &a[k * n + k + 1..(k + 1) * n];
        let tail: f64 = x[1..].iter().map(|t| t * t).sum();
        if tail == 0.0 {
            off[k] = x[0];
            continue;
        }
        let norm = math::sqrt(x[0] * x[0] + tail);
        let alpha = if x[0] > 0.0 { -norm } else { norm };
        let v = &mut v[..m];
        v.copy_from_slice(x);
        v[0] -= alpha;
        let vtv = v[0] * v[0] + tail;
        let tau = 2.0 / vtv;
        off[k] = alpha;

        // p = tau * B v with B the trailing block; accumulated row by row so
        // the inner loop is a contiguous axpy.
        let p = &mut p[..m];
        p.fill(0.0);
        for i in 0..m {
            let row = &a[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            let vi = tau * v[i];
            for (pj, bij) in p.iter_mut().zip(row) {
                *pj += bij * vi;
            }
        }
        let half_k = 0.5 * tau * v.iter().zip(p.iter()).map(|(a, b)| a * b).sum::<f64>();
        for (pj, vj) in p.iter_mut().zip(v.iter()) {
            *pj -= half_k * vj;
        }
        // B -= v q^T + q v^T
        for i in 0..m {
            let row = &mut a[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
            let (vi, qi) = (v[i], p[i]);
            for ((bij, vj), qj) in row.iter_mut().zip(v.iter()).zip(p.iter()) {
                *bij -= vi * qj + qi * vj;
            }
        }
    }
    diag[n - 1] = a[n * n - 1];
    (diag, off)
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
/// `diag` is overwritten with the (unsorted) eigenvalues.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    if n > 0 {
        off[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if sweeps == MAX_QL_SWEEPS {
                return Err(Error::NoConvergence {
                    order: n,
                    residual: off[l].abs(),
                });
            }
            sweeps += 1;
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = math::hypot(g, 1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = math::hypot(f, g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

/// `[sum_i (lambda_i - center)^k for k in 1..=k_max]`, each sum compensated.
pub fn centered_power_sums(s: &Spectrum, center: f64, k_max: usize) -> Vec<f64> {
    let mut acc = vec![CompensatedSum::new(); k_max];
    for &lambda in s.values() {
        let x = lambda - center;
        let mut power = 1.0;
        for slot in acc.iter_mut() {
            power *= x;
            slot.add(power);
        }
    }
    acc.iter().map(CompensatedSum::value).collect()
}

/// Spectrum rescaled as `mu_i = (lambda_i - d) / sqrt(d n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSpectrum {
    mu: Vec<f64>,
    d: u64,
}

impl NormalizedSpectrum {
    /// Rescaled eigenvalues, ascending.
    pub fn values(&self) -> &[f64] {
        &self.mu
    }

    /// Number of eigenvalues.
    pub fn len(&self) -> usize {
        self.mu.len()
    }

    /// Always false.
    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// Centering and scale parameter `d`.
    pub fn d(&self) -> u64 {
        self.d
    }

    /// `sum_i mu_i^k`, compensated.
    pub fn power_sum(&self, k: u32) -> f64 {
        math::sum_compensated(self.mu.iter().map(|&x| math::powi(x, k)))
    }
}

/// Centers at `d` and scales by `1/sqrt(d n)`, `n` being the spectrum length.
pub fn normalize_spectrum(s: &Spectrum, d: u64) -> Result<NormalizedSpectrum> {
    if d == 0 {
        return Err(invalid("normalization needs d >= 1"));
    }
    let df = d as f64;
    let scale = math::sqrt(df * s.len() as f64);
    Ok(NormalizedSpectrum {
        mu: s.values().iter().map(|&l| (l - df) / scale).collect(),
        d,
    })
}

/// `(1/n) sum_i mu_i^k`.
pub fn empirical_moment(ns: &NormalizedSpectrum, k: u32) -> f64 {
    ns.power_sum(k) / ns.len() as f64
}

/// Catalan number `C_m` by exact integer recurrence; `None` on overflow.
pub fn catalan(m: u32) -> Option<u128> {
    let mut c: u128 = 1;
    for i in 0..m as u128 {
        // C_{i+1} = C_i * 2(2i+1) / (i+2), exact at every step
        c = c.checked_mul(2 * (2 * i + 1))? / (i + 2);
    }
    Some(c)
}

/// `k`-th moment of the semicircle density `sqrt(4 - x^2) / (2 pi)` on
/// `[-2, 2]`: zero for odd `k`, the Catalan number `C_{k/2}` for even `k`.
pub fn semicircle_moment(k: u32) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    match catalan(k / 2) {
        Some(c) => c as f64,
        None => {
            let mut c = 1.0;
            for i in 0..(k / 2) {
                let i = i as f64;
                c = c * 2.0 * (2.0 * i + 1.0) / (i + 2.0);
            }
            c
        }
    }
}

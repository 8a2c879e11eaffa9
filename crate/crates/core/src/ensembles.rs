//! The GOE, its shifted and scaled version `M(n, d) = sqrt(d) M(n) + d I`,
//! and the Wishart ensemble `W(n, d) = X X^T`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::math::{self, CompensatedSum};
use crate::rng::{NormalStream, RngState};

/// Real symmetric matrix stored as its packed upper triangle (row-major).
///
/// Element `(i, j)` with `i <= j` lives at `i*n - i*(i-1)/2 + (j - i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    entries: Vec<f64>,
}

/// Number of stored entries for an order-`n` matrix.
pub const fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

impl SymmetricMatrix {
    /// Zero matrix of order `n`.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; packed_len(n)],
        }
    }

    /// Identity of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Wraps an existing packed upper triangle.
    pub fn from_packed(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != packed_len(n) {
            return Err(invalid(format!(
                "packed storage for order {n} needs {} entries, got {}",
                packed_len(n),
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|x| !x.is_finite()) {
            return Err(invalid(format!("non-finite matrix entry {bad}")));
        }
        Ok(Self { n, entries })
    }

    /// Builds a matrix from `f(i, j)` evaluated on the upper triangle.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(packed_len(n));
        for i in 0..n {
            for j in i..n {
                entries.push(f(i, j));
            }
        }
        Self { n, entries }
    }

    /// Builds a matrix from a dense row-major array, reading the upper triangle.
    pub fn from_dense_upper(n: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != n * n {
            return Err(invalid(format!(
                "dense order-{n} matrix needs {} entries",
                n * n
            )));
        }
        Self::from_packed(n, Self::from_fn(n, |i, j| dense[i * n + j]).entries)
    }

    /// Matrix order.
    pub fn order(&self) -> usize {
        self.n
    }

    /// Packed upper triangle.
    pub fn packed(&self) -> &[f64] {
        &self.entries
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.n - i * i.saturating_sub(1) / 2 + (j - i)
    }

    /// Entry `(i, j)`; symmetric by construction.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[self.index(i, j)]
    }

    /// Sets entries `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.index(i, j);
        self.entries[k] = value;
    }

    /// Full row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                out[i * n + j] = self.entries[k];
                out[j * n + i] = self.entries[k];
                k += 1;
            }
        }
        out
    }

    /// Diagonal entries.
    pub fn diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.get(i, i))
    }

    /// Trace, compensated.
    pub fn trace(&self) -> f64 {
        math::sum_compensated(self.diagonal())
    }

    /// Frobenius norm; an upper bound on the spectral norm.
    pub fn frobenius_norm(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        let mut k = 0;
        for i in 0..self.n {
            for j in i..self.n {
                let x = self.entries[k];
                acc.add(if i == j { x * x } else { 2.0 * x * x });
                k += 1;
            }
        }
        math::sqrt(acc.value())
    }

    /// `scale * self`.
    pub fn scaled(&self, scale: f64) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|x| scale * x).collect(),
        }
    }
}

/// Matrix order and degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleParams {
    /// Matrix order.
    pub n: usize,
    /// Degrees of freedom.
    pub d: u64,
}

impl EnsembleParams {
    /// Checks `n >= 1` and `d >= 1`.
    pub fn new(n: usize, d: u64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("matrix order n must be at least 1"));
        }
        if d == 0 {
            return Err(invalid("degrees of freedom d must be at least 1"));
        }
        Ok(Self { n, d })
    }

    /// Like [`EnsembleParams::new`], additionally requiring `d >= n` as the
    /// Wishart density does.
    pub fn with_density(n: usize, d: u64) -> Result<Self> {
        let p = Self::new(n, d)?;
        if d < n as u64 {
            return Err(invalid(format!(
                "the Wishart density needs d >= n (got n = {n}, d = {d})"
            )));
        }
        Ok(p)
    }

    /// `d / n^3`.
    pub fn ratio(&self) -> f64 {
        let n = self.n as f64;
        self.d as f64 / (n * n * n)
    }
}

/// GOE matrix of order `n` drawn from `rng`: diagonal `N(0, 2)`, strict upper
/// triangle `N(0, 1)`, all independent.
pub fn sample_goe(n: usize, rng: &RngState) -> Result<SymmetricMatrix> {
    sample_goe_from(n, &mut rng.normals())
}

/// [`sample_goe`] drawing from an already-open stream.
pub fn sample_goe_from(n: usize, normals: &mut NormalStream) -> Result<SymmetricMatrix> {
    if n == 0 {
        return Err(invalid("matrix order n must be at least 1"));
    }
    Ok(SymmetricMatrix::from_fn(n, |i, j| {
        if i == j {
            normals.next_normal_scaled(core::f64::consts::SQRT_2)
        } else {
            normals.next_normal()
        }
    }))
}

/// `sqrt(d) m + d I`.
pub fn shift_scale_goe(m: &SymmetricMatrix, d: u64) -> Result<SymmetricMatrix> {
    if d == 0 {
        return Err(invalid("degrees of freedom d must be at least 1"));
    }
    let df = d as f64;
    let scale = math::sqrt(df);
    let mut out = m.scaled(scale);
    for i in 0..out.order() {
        let k = out.index(i, i);
        out.entries[k] += df;
    }
    Ok(out)
}

/// Draws `M(n, d)` directly.
pub fn sample_shifted_goe_from(
    params: EnsembleParams,
    normals: &mut NormalStream,
) -> Result<SymmetricMatrix> {
    shift_scale_goe(&sample_goe_from(params.n, normals)?, params.d)
}

/// Above this many degrees of freedom the Gram entries use compensated sums.
pub const COMPENSATED_GRAM_THRESHOLD: u64 = 100_000;

/// Wishart matrix `X X^T` with `X` an `n x d` standard Gaussian matrix.
pub fn sample_wishart(n: usize, d: u64, rng: &RngState) -> Result<SymmetricMatrix> {
    sample_wishart_from(EnsembleParams::new(n, d)?, &mut rng.normals())
}

/// [`sample_wishart`] drawing from an already-open stream. `X` is filled row
/// by row.
pub fn sample_wishart_from(
    params: EnsembleParams,
    normals: &mut NormalStream,
) -> Result<SymmetricMatrix> {
    let EnsembleParams { n, d } = params;
    let cols = usize::try_from(d).map_err(|_| invalid("d does not fit in memory"))?;
    let x: Vec<f64> = (0..n * cols).map(|_| normals.next_normal()).collect();
    let compensated = d > COMPENSATED_GRAM_THRESHOLD;
    Ok(SymmetricMatrix::from_fn(n, |i, j| {
        let ri = &x[i * cols..(i + 1) * cols];
        let rj = &x[j * cols..(j + 1) * cols];
        if compensated {
            math::sum_compensated(ri.iter().zip(rj).map(|(a, b)| a * b))
        } else {
            ri.iter().zip(rj).map(|(a, b)| a * b).sum()
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::symmetric_eigenvalues;

    #[test]
    fn packed_indexing_matches_dense() {
        let m = SymmetricMatrix::from_fn(5, |i, j| (10 * i + j) as f64);
        let dense = m.to_dense();
        for i in 0..5 {
            for j in 0..5 {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                assert_eq!(m.get(i, j), (10 * a + b) as f64);
                assert_eq!(dense[i * 5 + j], dense[j * 5 + i]);
            }
        }
        assert_eq!(m.packed().len(), 15);
    }

    #[test]
    fn from_packed_rejects_bad_input() {
        assert!(SymmetricMatrix::from_packed(3, vec![0.0; 5]).is_err());
        assert!(SymmetricMatrix::from_packed(2, vec![0.0, f64::NAN, 1.0]).is_err());
        assert!(SymmetricMatrix::from_packed(2, vec![1.0, 2.0, 3.0]).is_ok());
    }

    #[test]
    fn zero_order_is_rejected() {
        assert!(sample_goe(0, &RngState::new(1)).is_err());
        assert!(sample_wishart(0, 3, &RngState::new(1)).is_err());
        assert!(sample_wishart(2, 0, &RngState::new(1)).is_err());
        assert!(shift_scale_goe(&SymmetricMatrix::identity(2), 0).is_err());
        assert!(EnsembleParams::with_density(5, 4).is_err());
    }

    #[test]
    fn goe_is_deterministic() {
        let rng = RngState::with_stream(11, 3);
        assert_eq!(sample_goe(2, &rng).unwrap(), sample_goe(2, &rng).unwrap());
        assert_eq!(
            sample_wishart(3, 7, &rng).unwrap(),
            sample_wishart(3, 7, &rng).unwrap()
        );
    }

    #[test]
    fn goe_order_one_has_variance_two() {
        let root = RngState::new(5);
        let mut s = root.normals();
        let k = 100_000;
        let xs: Vec<f64> = (0..k)
            .map(|_| sample_goe_from(1, &mut s).unwrap().get(0, 0))
            .collect();
        let mean = xs.iter().sum::<f64>() / k as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
        assert!((var - 2.0).abs() < 0.1, "var {var}");
    }

    #[test]
    fn goe_entry_moments() {
        // 10^4 draws at n = 100; estimator stderr for Var(M_12) is sqrt(2/N),
        // for Cov(M_11, M_12) it is sqrt(2/N).
        let draws = 10_000;
        let mut s = RngState::new(17).normals();
        let mut m11 = Vec::with_capacity(draws);
        let mut m12 = Vec::with_capacity(draws);
        let mut m55 = Vec::with_capacity(draws);
        for _ in 0..draws {
            let m = sample_goe_from(100, &mut s).unwrap();
            m11.push(m.get(0, 0));
            m12.push(m.get(0, 1));
            m55.push(m.get(5, 5));
        }
        let nf = draws as f64;
        let var12 = m12.iter().map(|x| x * x).sum::<f64>() / nf;
        let var55 = m55.iter().map(|x| x * x).sum::<f64>() / nf;
        let cov = m11.iter().zip(&m12).map(|(a, b)| a * b).sum::<f64>() / nf;
        let se = (2.0 / nf).sqrt();
        assert!((var12 - 1.0).abs() < 3.0 * se, "Var(M12) {var12}");
        assert!((var55 - 2.0).abs() < 4.0 * 2.0 * se, "Var(M55) {var55}");
        assert!(cov.abs() < 3.0 * se, "Cov {cov}");
    }

    #[test]
    fn shift_scale_formula() {
        let m = SymmetricMatrix::from_fn(3, |i, j| (i + 2 * j) as f64 - 1.5);
        let one = shift_scale_goe(&m, 1).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = m.get(i, j) + if i == j { 1.0 } else { 0.0 };
                assert_eq!(one.get(i, j), expected);
            }
        }
        let x = SymmetricMatrix::from_packed(1, vec![0.7]).unwrap();
        assert_eq!(shift_scale_goe(&x, 4).unwrap().get(0, 0), 2.0 * 0.7 + 4.0);
        let four = shift_scale_goe(&m, 4).unwrap();
        assert_eq!(four.get(0, 2), 2.0 * m.get(0, 2));
    }

    #[test]
    fn shift_scale_moves_spectrum_affinely() {
        let m = sample_goe(5, &RngState::new(8)).unwrap();
        let d = 37;
        let base = symmetric_eigenvalues(&m).unwrap();
        let shifted = symmetric_eigenvalues(&shift_scale_goe(&m, d).unwrap()).unwrap();
        let s = (d as f64).sqrt();
        for (a, b) in base.values().iter().zip(shifted.values()) {
            assert!((s * a + d as f64 - b).abs() < 1e-10 * d as f64, "{a} {b}");
        }
    }

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn wishart_order_one_is_chi_square() {
        for (d, seed) in [(1u64, 1u64), (6, 2)] {
            let mut s = RngState::new(seed).normals();
            let k = 100_000;
            let xs: Vec<f64> = (0..k)
                .map(|_| {
                    sample_wishart_from(EnsembleParams::new(1, d).unwrap(), &mut s)
                        .unwrap()
                        .get(0, 0)
                })
                .collect();
            let (mean, var) = mean_var(&xs);
            let df = d as f64;
            let se_mean = (2.0 * df / k as f64).sqrt();
            // Var of the sample variance for chi-square(d): (mu4 - sigma^4)/k,
            // mu4 = 12 d + 3 (2d)^2.
            let mu4 = 12.0 * df + 12.0 * df * df;
            let se_var = ((mu4 - 4.0 * df * df) / k as f64).sqrt();
            assert!((mean - df).abs() < 3.0 * se_mean, "d={d} mean {mean}");
            assert!((var - 2.0 * df).abs() < 3.0 * se_var, "d={d} var {var}");
        }
    }

    #[test]
    fn wishart_is_psd_and_centered_at_d() {
        let (n, d) = (6usize, 9u64);
        let draws = 4000;
        let mut s = RngState::new(21).normals();
        let mut sums = vec![0.0; packed_len(n)];
        let mut sq = vec![0.0; packed_len(n)];
        for _ in 0..draws {
            let w = sample_wishart_from(EnsembleParams::new(n, d).unwrap(), &mut s).unwrap();
            let eig = symmetric_eigenvalues(&w).unwrap();
            assert!(eig.min() >= -1e-8 * d as f64);
            for (k, x) in w.packed().iter().enumerate() {
                sums[k] += x;
                sq[k] += x * x;
            }
        }
        let nf = draws as f64;
        let target = SymmetricMatrix::identity(n).scaled(d as f64);
        for k in 0..sums.len() {
            let mean = sums[k] / nf;
            let var = sq[k] / nf - mean * mean;
            let se = (var / nf).sqrt();
            assert!(
                (mean - target.packed()[k]).abs() < 4.0 * se,
                "entry {k}: {mean}"
            );
        }
    }

    #[test]
    fn shifted_goe_is_centered_at_d() {
        let params = EnsembleParams::new(4, 50).unwrap();
        let draws = 4000;
        let mut s = RngState::new(4).normals();
        let mut sums = vec![0.0; packed_len(4)];
        for _ in 0..draws {
            let m = sample_shifted_goe_from(params, &mut s).unwrap();
            for (k, x) in m.packed().iter().enumerate() {
                sums[k] += x;
            }
        }
        let target = SymmetricMatrix::identity(4).scaled(50.0);
        let m = SymmetricMatrix::identity(4);
        for i in 0..4 {
            for j in i..4 {
                let k = m.index(i, j);
                let sd = if i == j {
                    (100.0f64).sqrt()
                } else {
                    (50.0f64).sqrt()
                };
                let se = sd / (draws as f64).sqrt();
                assert!((sums[k] / draws as f64 - target.get(i, j)).abs() < 4.0 * se);
            }
        }
    }

    #[test]
    fn compensated_gram_path_is_used_for_large_d() {
        let params = EnsembleParams::new(2, COMPENSATED_GRAM_THRESHOLD + 1).unwrap();
        let w = sample_wishart_from(params, &mut RngState::new(2).normals()).unwrap();
        let d = params.d as f64;
        assert!((w.get(0, 0) - d).abs() < 6.0 * (2.0 * d).sqrt());
        assert!(w.get(0, 1).abs() < 6.0 * d.sqrt());
    }
}

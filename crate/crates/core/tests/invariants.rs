//! Statistical and algebraic invariants that span several modules.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use wglab_core::densities::{alpha_direct, alpha_exact, in_q, AlphaEvaluator};
use wglab_core::ensembles::{sample_goe, sample_wishart, shift_scale_goe};
use wglab_core::limit_theory::{
    clt_covariance_estimate, limiting_tv_closed_form, limiting_tv_mc, limiting_tv_quadrature,
    CovMatrix2, LimitParams, LIMIT_COVARIANCE,
};
use wglab_core::spectral::{
    empirical_moment, normalize_spectrum, semicircle_moment, symmetric_eigenvalues,
};
use wglab_core::tv_mc::{integrand, tv_profile, Side};
use wglab_core::RngState;

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_preserve_trace(n in 1usize..24, seed in any::<u64>(), scale in 1e-3f64..1e4) {
        let m = sample_goe(n, &RngState::new(seed)).unwrap().scaled(scale);
        let s = symmetric_eigenvalues(&m).unwrap();
        let tol = 1e-12 * n as f64 * m.frobenius_norm();
        prop_assert!((s.sum() - m.trace()).abs() <= tol);
        prop_assert!(s.values().windows(2).all(|w| w[0] <= w[1]));
        // sum of squares equals the squared Frobenius norm
        let ss: f64 = s.values().iter().map(|x| x * x).sum();
        let f2 = m.frobenius_norm().powi(2);
        prop_assert!((ss - f2).abs() <= 1e-10 * f2.max(1e-300));
    }

    #[test]
    fn alpha_routes_agree_on_window_spectra(n in 1usize..=64, seed in any::<u64>()) {
        let d = (n * n * n).max(2 * n) as u64;
        let m = shift_scale_goe(&sample_goe(n, &RngState::new(seed)).unwrap(), d).unwrap();
        let s = symmetric_eigenvalues(&m).unwrap();
        prop_assume!(in_q(&s, d));
        let a = alpha_exact(&s, d).unwrap();
        let b = alpha_direct(&s, d).unwrap();
        prop_assert!(a == b || (a - b).abs() <= 1e-6, "{} vs {}", a, b);
    }

    #[test]
    fn wishart_draws_are_psd(n in 1usize..12, extra in 0u64..20, seed in any::<u64>()) {
        let d = n as u64 + extra;
        let w = sample_wishart(n, d, &RngState::new(seed)).unwrap();
        let s = symmetric_eigenvalues(&w).unwrap();
        prop_assert!(s.min() >= -1e-8 * d as f64);
    }

    #[test]
    fn integrand_bounded(alpha in prop::num::f64::ANY, psd in any::<bool>()) {
        prop_assume!(!alpha.is_nan());
        for side in [Side::Goe, Side::Wishart] {
            let v = integrand(side, alpha, psd);
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn sampling_is_deterministic(n in 1usize..10, seed in any::<u64>(), stream in any::<u64>()) {
        let rng = RngState::with_stream(seed, stream);
        prop_assert_eq!(sample_goe(n, &rng).unwrap(), sample_goe(n, &rng).unwrap());
        prop_assert_eq!(sample_wishart(n, 2 * n as u64, &rng).unwrap(), sample_wishart(n, 2 * n as u64, &rng).unwrap());
    }
}

#[test]
fn goe_spectrum_stays_in_three_sigma_window() {
    for n in [50usize, 100] {
        let inside = (0..100u64)
            .filter(|&seed| {
                let m = sample_goe(n, &RngState::with_stream(seed, n as u64)).unwrap();
                let s = symmetric_eigenvalues(&m.scaled(1.0 / (n as f64).sqrt())).unwrap();
                s.values().iter().all(|x| x.abs() <= 3.0)
            })
            .count();
        assert!(inside >= 99, "n={n}: {inside}/100");
    }
}

#[test]
fn shifted_goe_lands_in_q() {
    let (n, d) = (64usize, 64u64 * 64 * 64);
    let inside = (0..1000u64)
        .filter(|&seed| {
            let m = shift_scale_goe(&sample_goe(n, &RngState::new(seed)).unwrap(), d).unwrap();
            in_q(&symmetric_eigenvalues(&m).unwrap(), d)
        })
        .count();
    assert!(inside >= 990, "{inside}/1000");
}

#[test]
fn empirical_moments_approach_semicircle() {
    for k in [2u32, 4] {
        let mut last = f64::INFINITY;
        for n in [50usize, 200, 800] {
            let devs: Vec<f64> = (0..100u64)
                .map(|seed| {
                    let m = sample_goe(n, &RngState::with_stream(seed, 1)).unwrap();
                    let s = symmetric_eigenvalues(&shift_scale_goe(&m, 1).unwrap()).unwrap();
                    let ns = normalize_spectrum(&s, 1).unwrap();
                    (empirical_moment(&ns, k) - semicircle_moment(k)).abs()
                })
                .collect();
            let med = median(devs);
            assert!(med < last, "k={k} n={n}: {med} !< {last}");
            last = med;
        }
    }
}

#[test]
fn quartic_pair_tends_to_its_limit() {
    // d = n^3 (c = 1): S2 -> 1/4 and S4 -> -1/4
    let mut last = (f64::INFINITY, f64::INFINITY);
    for n in [16usize, 32, 64] {
        let d = (n * n * n) as u64;
        let ev = AlphaEvaluator::new(n, d).unwrap();
        let (mut s2, mut s4) = (Vec::new(), Vec::new());
        for seed in 0..200u64 {
            let m = shift_scale_goe(&sample_goe(n, &RngState::with_stream(seed, 9)).unwrap(), d)
                .unwrap();
            let t = ev
                .breakdown(&symmetric_eigenvalues(&m).unwrap())
                .unwrap()
                .terms
                .unwrap();
            s2.push(t.s2);
            s4.push(t.s4);
        }
        let dev = ((median(s2) - 0.25).abs(), (median(s4) + 0.25).abs());
        assert!(
            dev.0 < last.0 && dev.1 < last.1,
            "n={n}: {dev:?} vs {last:?}"
        );
        last = dev;
    }
}

/// `(Tr T, Tr T^3) / (sqrt n, n^{3/2})` for the tridiagonal model of the GOE:
/// diagonal N(0, 2), off-diagonal chi_{n-1}, ..., chi_1. Its spectrum has the
/// same law as that of M(n), so this pair has the law of
/// `(sum mu_i, sum mu_i^3)`.
fn tridiagonal_pair(n: usize, rng: &mut ChaCha20Rng) -> (f64, f64) {
    let diag: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            2f64.sqrt() * z
        })
        .collect();
    let off: Vec<f64> = (1..n)
        .map(|k| ChiSquared::new((n - k) as f64).unwrap().sample(rng).sqrt())
        .collect();
    let tr1: f64 = diag.iter().sum();
    let mut tr3: f64 = diag.iter().map(|x| x * x * x).sum();
    for (i, e) in off.iter().enumerate() {
        tr3 += 3.0 * e * e * (diag[i] + diag[i + 1]);
    }
    let nf = n as f64;
    (tr1 / nf.sqrt(), tr3 / nf.powf(1.5))
}

fn tridiagonal_covariance(n: usize, reps: usize, seed: u64) -> CovMatrix2 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let pairs: Vec<_> = (0..reps)
        .map(|_| {
            let (a, b) = tridiagonal_pair(n, &mut rng);
            wglab_core::limit_theory::CltPair { n1: a, n3: b }
        })
        .collect();
    CovMatrix2::from_pairs(&pairs).unwrap()
}

#[test]
fn tridiagonal_model_matches_full_goe_pipeline() {
    let n = 30;
    let full = clt_covariance_estimate(n, 20_000, RngState::new(71)).unwrap();
    let tri = tridiagonal_covariance(n, 20_000, 71);
    // sampling sd of each entry at 2e4 reps is below 2% of its value
    for (a, b, target) in [
        (full.c11, tri.c11, 2.0),
        (full.c12, tri.c12, 6.0),
        (full.c22, tri.c22, 24.0),
    ] {
        assert!((a - b).abs() < 0.08 * target, "{a} vs {b}");
    }
}

#[test]
fn clt_covariance_converges_with_n() {
    let target = LIMIT_COVARIANCE;
    let mut last = [f64::INFINITY; 3];
    for n in [50usize, 200, 800] {
        let batches: Vec<CovMatrix2> = (0..5)
            .map(|b| tridiagonal_covariance(n, 100_000, 1000 * n as u64 + b))
            .collect();
        let dev = [
            (median(batches.iter().map(|c| c.c11).collect()) - target.c11).abs(),
            (median(batches.iter().map(|c| c.c12).collect()) - target.c12).abs(),
            (median(batches.iter().map(|c| c.c22).collect()) - target.c22).abs(),
        ];
        // c11 is exactly 2 at every n; it only has to stay put
        assert!(dev[0] < 0.03, "n={n}: c11 off by {}", dev[0]);
        assert!(
            dev[1] < last[1] && dev[2] < last[2],
            "n={n}: {dev:?} vs {last:?}"
        );
        last = dev;
    }
}

#[test]
fn profile_has_bounded_integrand_and_consistent_flags() {
    let (n, d) = (6usize, 300u64);
    for r in tv_profile(n, d, 3000, RngState::new(4)).unwrap() {
        let r = r.unwrap();
        assert!((0.0..=1.0).contains(&r.integrand));
        if r.breakdown.psd {
            if let Some(t) = r.breakdown.terms {
                assert!((t.sum() + t.remainder - r.breakdown.alpha_exact).abs() < 1e-9);
            }
        } else {
            assert_eq!(r.integrand, 1.0);
        }
    }
}

#[test]
fn limit_three_way_agreement() {
    for (k, c) in [0.01, 0.1, 1.0 / 48.0, 0.5, 1.0, 10.0, 100.0]
        .into_iter()
        .enumerate()
    {
        let p = LimitParams::new(c).unwrap();
        let cf = limiting_tv_closed_form(p);
        let q = limiting_tv_quadrature(p).unwrap().value;
        let mc = limiting_tv_mc(p, 1_000_000, RngState::with_stream(k as u64, 77)).unwrap();
        assert!((cf - q).abs() <= 1e-9, "c={c}: {cf} vs {q}");
        assert!(
            (cf - mc.mean).abs() <= 3.0 * mc.stderr,
            "c={c}: {cf} vs {mc:?}"
        );
    }
}

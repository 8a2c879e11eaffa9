use statrs::distribution::{ChiSquared, Continuous, ContinuousCDF, Normal};

/// `TV(chi2_d, N(d, 2d)) = int (g - f)_+`, integrated in `x = t^2` on the
/// positive half-line with composite Simpson, plus the normal mass below 0.
pub fn order_one_tv(d: u64) -> f64 {
    let f = ChiSquared::new(d as f64).unwrap();
    let g = Normal::new(d as f64, (2.0 * d as f64).sqrt()).unwrap();
    let upper = (d as f64 + 40.0 * (2.0 * d as f64).sqrt() + 200.0).sqrt();
    let steps = 400_000;
    let h = upper / steps as f64;
    let integrand = |t: f64| {
        let x = t * t;
        (g.pdf(x) - f.pdf(x)).max(0.0) * 2.0 * t
    };
    let mut acc = integrand(0.0) + integrand(upper);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * integrand(i as f64 * h);
    }
    acc * h / 3.0 + g.cdf(0.0)
}

//! One-sample Kolmogorov–Smirnov statistic and asymptotic p-value.
//!
//! The p-value uses the Kolmogorov limiting distribution
//! `Q(t) = 2 Σ_{j≥1} (-1)^{j-1} exp(-2 j² t²)` evaluated at the
//! finite-sample-corrected argument `t = (√m + 0.12 + 0.11/√m) · D`.

/// Kolmogorov limiting survival function `Q(t)`.
pub fn kolmogorov_q(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j as f64) * (j as f64) * t * t).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Result of a one-sample KS test.
#[derive(Clone, Copy, Debug)]
pub struct KsResult {
    /// Supremum distance between the empirical CDF and the reference CDF.
    pub statistic: f64,
    /// Asymptotic p-value with the finite-sample argument correction.
    pub p_value: f64,
}

/// One-sample KS test of `sample` against the continuous CDF `cdf`.
pub fn ks_test<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> KsResult {
    assert!(!sample.is_empty(), "KS test requires a non-empty sample");
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN sample"));
    let m = xs.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in xs.iter().enumerate() {
        let u = cdf(x);
        let lo = u - i as f64 / m;
        let hi = (i + 1) as f64 / m - u;
        d = d.max(lo).max(hi);
    }
    let arg = (m.sqrt() + 0.12 + 0.11 / m.sqrt()) * d;
    KsResult { statistic: d, p_value: kolmogorov_q(arg) }
}

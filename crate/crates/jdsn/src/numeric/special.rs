//! Special functions not covered by `statrs`.
//!
//! `statrs` provides `ln_gamma`, `digamma`, and the error functions; the
//! trigamma function is implemented here with the standard recurrence plus
//! asymptotic series, accurate to ~1e-13 relative error on the positive axis.

/// Trigamma function `psi'(x)` for `x > 0`.
///
/// Uses the recurrence `psi'(x) = psi'(x+1) + 1/x^2` to shift the argument
/// above 12, then the asymptotic series
/// `psi'(x) ~ 1/x + 1/(2x^2) + sum_k B_{2k} / x^{2k+1}`.
pub fn trigamma(x: f64) -> f64 {
    assert!(x > 0.0 && x.is_finite(), "trigamma requires finite x > 0");
    let mut acc = 0.0;
    let mut y = x;
    while y < 12.0 {
        acc += 1.0 / (y * y);
        y += 1.0;
    }
    let inv = 1.0 / y;
    let inv2 = inv * inv;
    // 1/y + 1/(2y^2) + 1/y^3 * (1/6 - 1/(30 y^2) + 1/(42 y^4) - 1/(30 y^6) + 5/(66 y^8))
    let series = inv
        + 0.5 * inv2
        + inv2
            * inv
            * (1.0 / 6.0
                + inv2
                    * (-1.0 / 30.0 + inv2 * (1.0 / 42.0 + inv2 * (-1.0 / 30.0 + inv2 * 5.0 / 66.0))));
    acc + series
}

/// Standard normal cumulative distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / std::f64::consts::SQRT_2)
}

//! Halton low-discrepancy sequence used for deterministic multi-start
//! optimizer initialization.

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical-inverse (van der Corput) value of `index` in the given `base`.
pub fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base as u64) as f64 * inv;
        index /= base as u64;
        inv /= b;
    }
    out
}

/// `dim`-dimensional Halton point with 1-based `index` (index 0 is the
/// origin and is skipped by callers). Supports up to 8 dimensions.
pub fn halton_point(index: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "halton_point supports at most 8 dimensions");
    (0..dim).map(|d| radical_inverse(index, PRIMES[d])).collect()
}

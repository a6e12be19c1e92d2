//! Helpers for small symmetric matrices (dimension ≤ ~8) built on nalgebra's
//! symmetric eigendecomposition: inverse, square root, eigenvalue bounds, and
//! norms used by the information-matrix diagnostics.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Eigenvalues of a symmetric matrix (unordered).
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    m.clone().symmetric_eigen().eigenvalues.iter().copied().collect()
}

/// Smallest and largest eigenvalue of a symmetric matrix.
pub fn eig_range(m: &DMatrix<f64>) -> (f64, f64) {
    let ev = sym_eigenvalues(m);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in ev {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

/// Relative-threshold positive-definiteness check: requires
/// `min_eig > rel_floor * max_eig` with a positive `max_eig`.
pub fn check_positive_definite(m: &DMatrix<f64>, rel_floor: f64) -> Result<()> {
    let (lo, hi) = eig_range(m);
    if !(hi > 0.0) || lo <= rel_floor * hi {
        return Err(Error::Numerical(format!(
            "matrix is not positive definite: eigenvalue range [{lo:e}, {hi:e}], \
             relative floor {rel_floor:e}"
        )));
    }
    Ok(())
}

/// Inverse of a symmetric positive-definite matrix via eigendecomposition.
pub fn sym_inverse(m: &DMatrix<f64>, rel_floor: f64) -> Result<DMatrix<f64>> {
    check_positive_definite(m, rel_floor)?;
    let eig = m.clone().symmetric_eigen();
    let mut d = DMatrix::zeros(m.nrows(), m.ncols());
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        d[(i, i)] = 1.0 / v;
    }
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

/// Symmetric square root of a positive-semidefinite matrix. Eigenvalues in
/// `[-rel_tol * max_eig, 0)` are clamped to zero; more negative ones are an
/// error.
pub fn sym_sqrt(m: &DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>> {
    let eig = m.clone().symmetric_eigen();
    let max_eig = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let mut d = DMatrix::zeros(m.nrows(), m.ncols());
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        if v < -rel_tol * max_eig.max(1e-300) {
            return Err(Error::Numerical(format!(
                "matrix square root of an indefinite matrix (eigenvalue {v:e})"
            )));
        }
        d[(i, i)] = v.max(0.0).sqrt();
    }
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

/// Frobenius norm.
pub fn frobenius(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Infinity norm (maximum absolute row sum).
pub fn inf_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spd_example() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 0.6449340668482264])
    }

    #[test]
    fn inverse_times_original_is_identity() {
        let m = spd_example();
        let inv = sym_inverse(&m, 1e-12).unwrap();
        let id = &m * &inv;
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(id[(i, j)], expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let m = spd_example();
        let r = sym_sqrt(&m, 1e-12).unwrap();
        let sq = &r * &r;
        for i in 0..2 {
            for j in 0..2 {
                assert_relative_eq!(sq[(i, j)], m[(i, j)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pd_check_rejects_singular() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(check_positive_definite(&m, 1e-10).is_err());
    }

    #[test]
    fn norms_match_hand_values() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 3.0, 4.0]);
        assert_relative_eq!(frobenius(&m), (30.0_f64).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(inf_norm(&m), 7.0, max_relative = 1e-15);
    }
}

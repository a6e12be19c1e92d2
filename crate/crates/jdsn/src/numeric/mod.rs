//! Numerical utilities: quadrature, special functions, small symmetric
//! linear algebra, Kolmogorov–Smirnov statistics, low-discrepancy sequences,
//! and deterministic seed derivation.

pub mod ks;
pub mod linalg;
pub mod lowdisc;
pub mod quad;
pub mod rng;
pub mod special;

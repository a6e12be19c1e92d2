//! Parameter points and box domains.
//!
//! The full parameter is `theta = (mu, sigma, alpha)` with fixed block
//! dimensions; optimization runs over a finite axis-aligned box with strictly
//! ordered bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A full parameter point `(mu, sigma, alpha)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterPoint {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl ParameterPoint {
    pub fn new(mu: Vec<f64>, sigma: Vec<f64>, alpha: Vec<f64>) -> Self {
        Self { mu, sigma, alpha }
    }

    /// Block dimensions `(d1, d2, d3)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.mu.len(), self.sigma.len(), self.alpha.len())
    }

    /// Total dimension `d1 + d2 + d3`.
    pub fn dim(&self) -> usize {
        self.mu.len() + self.sigma.len() + self.alpha.len()
    }

    /// Concatenated coordinates in block order.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        out.extend_from_slice(&self.mu);
        out.extend_from_slice(&self.sigma);
        out.extend_from_slice(&self.alpha);
        out
    }

    /// Rebuilds a point from concatenated coordinates.
    pub fn from_flat(dims: (usize, usize, usize), flat: &[f64]) -> Self {
        let (d1, d2, d3) = dims;
        assert_eq!(flat.len(), d1 + d2 + d3, "flat parameter length mismatch");
        Self {
            mu: flat[..d1].to_vec(),
            sigma: flat[d1..d1 + d2].to_vec(),
            alpha: flat[d1 + d2..].to_vec(),
        }
    }

    pub fn all_finite(&self) -> bool {
        self.flatten().iter().all(|v| v.is_finite())
    }
}

/// Axis-aligned box domain with finite, strictly ordered bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterDomain {
    pub lower: ParameterPoint,
    pub upper: ParameterPoint,
}

impl ParameterDomain {
    pub fn new(lower: ParameterPoint, upper: ParameterPoint) -> Result<Self> {
        let dom = Self { lower, upper };
        dom.validate()?;
        Ok(dom)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.dims() != self.upper.dims() {
            return Err(Error::Config(
                "domain bounds have mismatched block dimensions".into(),
            ));
        }
        for (lo, hi) in self.lower.flatten().iter().zip(self.upper.flatten()) {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Config("domain bounds must be finite".into()));
            }
            if !(lo < &hi) {
                return Err(Error::Config(format!(
                    "domain bounds must satisfy lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.lower.dims()
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    /// Flat lower bounds.
    pub fn lower_flat(&self) -> Vec<f64> {
        self.lower.flatten()
    }

    /// Flat upper bounds.
    pub fn upper_flat(&self) -> Vec<f64> {
        self.upper.flatten()
    }

    /// Box center.
    pub fn center(&self) -> ParameterPoint {
        let lo = self.lower.flatten();
        let hi = self.upper.flatten();
        let mid: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        ParameterPoint::from_flat(self.dims(), &mid)
    }

    /// Whether `p` lies strictly inside the open box.
    pub fn contains_strictly(&self, p: &ParameterPoint) -> bool {
        if p.dims() != self.dims() {
            return false;
        }
        p.flatten()
            .iter()
            .zip(self.lower.flatten().iter().zip(self.upper.flatten()))
            .all(|(x, (lo, hi))| *x > *lo && *x < hi)
    }

    /// Clamps a flat coordinate vector strictly inside the box, with a margin
    /// of `margin_frac` times the box width per coordinate.
    pub fn clamp_inside_flat(&self, x: &mut [f64], margin_frac: f64) {
        let lo = self.lower.flatten();
        let hi = self.upper.flatten();
        for (i, xi) in x.iter_mut().enumerate() {
            let m = margin_frac * (hi[i] - lo[i]);
            if !xi.is_finite() {
                *xi = 0.5 * (lo[i] + hi[i]);
            }
            *xi = xi.clamp(lo[i] + m, hi[i] - m);
        }
    }
}

//! Jump-mark density families.
//!
//! Each family is a two-parameter density `f_alpha(z)` with `alpha = (a1, a2)`
//! taken from the leading entries of the jump parameter vector:
//!
//! ```text
//! normal      a1 = mean,  a2 = std dev > 0          support R
//! gamma       a1 = scale > 0, a2 = shape > 1        support (0, inf)
//! ig          a1 = mean > 0,  a2 = shape > 0        support (0, inf)   (inverse Gaussian)
//! weibull     a1 = scale > 0, a2 = shape > 1        support (0, inf)
//! lognormal   a1 = log-mean,  a2 = log-sd > 0       support (0, inf)
//! ```
//!
//! The shape restrictions (`a2 > 1` for gamma and weibull) keep the density
//! bounded near zero so the threshold filter's small-increment analysis
//! applies; they are enforced by [`JumpDensityFamily::admissible`].
//!
//! [`LogPdfDerivs`] carries all partial derivatives of `L = log f_alpha(z)`
//! through second order that the jump-contrast kernel needs. Every formula is
//! pinned in unit tests against 50-digit numerical differentiation of the
//! density definitions.

use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};
use crate::numeric::quad::adaptive_simpson;
use crate::numeric::special::trigamma;

/// Support of a mark density.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportKind {
    /// The whole real line.
    WholeLine,
    /// The open positive half-line `(0, inf)`.
    PositiveHalfLine,
}

/// Family tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityKind {
    Normal,
    Gamma,
    InverseGaussian,
    Weibull,
    LogNormal,
}

/// A jump-mark density family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JumpDensityFamily {
    pub kind: DensityKind,
}

/// Partial derivatives of `L(alpha, z) = log f_alpha(z)` through second
/// order, in the density parameters `(a1, a2)` and the mark coordinate `z`.
#[derive(Clone, Copy, Debug)]
pub struct LogPdfDerivs {
    pub lz: f64,
    pub lzz: f64,
    pub la: [f64; 2],
    pub lza: [f64; 2],
    pub laa: [[f64; 2]; 2],
}

impl JumpDensityFamily {
    pub fn new(kind: DensityKind) -> Self {
        Self { kind }
    }

    /// Parses a short family id.
    pub fn from_id(id: &str) -> Result<Self> {
        let kind = match id {
            "normal" => DensityKind::Normal,
            "gamma" => DensityKind::Gamma,
            "ig" => DensityKind::InverseGaussian,
            "weibull" => DensityKind::Weibull,
            "lognormal" => DensityKind::LogNormal,
            other => {
                return Err(Error::Config(format!(
                    "unknown density family '{other}' \
                     (expected normal|gamma|ig|weibull|lognormal)"
                )))
            }
        };
        Ok(Self { kind })
    }

    pub fn id(&self) -> &'static str {
        match self.kind {
            DensityKind::Normal => "normal",
            DensityKind::Gamma => "gamma",
            DensityKind::InverseGaussian => "ig",
            DensityKind::Weibull => "weibull",
            DensityKind::LogNormal => "lognormal",
        }
    }

    pub fn support(&self) -> SupportKind {
        match self.kind {
            DensityKind::Normal => SupportKind::WholeLine,
            _ => SupportKind::PositiveHalfLine,
        }
    }

    /// Number of density parameters (always 2 for the built-in families).
    pub fn alpha_dim(&self) -> usize {
        2
    }

    /// Small-`z` blow-up exponent `q` of `d(log f)/dz`, governing the
    /// admissible filter exponent range. `None` for the whole-line (normal)
    /// family, where no boundary blow-up occurs. The log-normal family's
    /// blow-up is `log(z)/z`, which is dominated by `q = 1` up to a log
    /// factor absorbed in the rate condition.
    pub fn q_exponent(&self) -> Option<f64> {
        match self.kind {
            DensityKind::Normal => None,
            DensityKind::Gamma | DensityKind::Weibull | DensityKind::LogNormal => Some(1.0),
            DensityKind::InverseGaussian => Some(2.0),
        }
    }

    /// Open admissible interval for the filter exponent `rho`.
    pub fn rho_range(&self) -> (f64, f64) {
        let hi = match self.q_exponent() {
            None => 0.5,
            Some(q) => (0.25 / q).min(0.5),
        };
        (0.0, hi)
    }

    /// Validates the leading density parameters (the jump parameter vector
    /// may be longer when the jump coefficient carries extra parameters).
    pub fn admissible(&self, alpha: &[f64]) -> Result<()> {
        if alpha.len() < self.alpha_dim() {
            return Err(Error::Model(format!(
                "family '{}' needs {} density parameters, got {}",
                self.id(),
                self.alpha_dim(),
                alpha.len()
            )));
        }
        let (a1, a2) = (alpha[0], alpha[1]);
        if !a1.is_finite() || !a2.is_finite() {
            return Err(Error::Model("density parameters must be finite".into()));
        }
        let ok = match self.kind {
            DensityKind::Normal => a2 > 0.0,
            DensityKind::Gamma => a1 > 0.0 && a2 > 1.0,
            DensityKind::InverseGaussian => a1 > 0.0 && a2 > 0.0,
            DensityKind::Weibull => a1 > 0.0 && a2 > 1.0,
            DensityKind::LogNormal => a2 > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Model(format!(
                "inadmissible parameters ({a1}, {a2}) for family '{}'",
                self.id()
            )))
        }
    }

    /// `log f_alpha(z)`, or `None` when `z` is outside the open support.
    pub fn log_pdf(&self, alpha: &[f64], z: f64) -> Option<f64> {
        let (a1, a2) = (alpha[0], alpha[1]);
        if self.support() == SupportKind::PositiveHalfLine && z <= 0.0 {
            return None;
        }
        let l = match self.kind {
            DensityKind::Normal => {
                let t = (z - a1) / a2;
                -a2.ln() - 0.5 * LN_2PI - 0.5 * t * t
            }
            DensityKind::Gamma => (a2 - 1.0) * z.ln() - z / a1 - ln_gamma(a2) - a2 * a1.ln(),
            DensityKind::InverseGaussian => {
                let d = z - a1;
                0.5 * a2.ln() - 0.5 * LN_2PI - 1.5 * z.ln() - a2 * d * d / (2.0 * a1 * a1 * z)
            }
            DensityKind::Weibull => {
                let w = (z / a1).powf(a2);
                a2.ln() - a2 * a1.ln() + (a2 - 1.0) * z.ln() - w
            }
            DensityKind::LogNormal => {
                let m = z.ln() - a1;
                -0.5 * LN_2PI - a2.ln() - z.ln() - m * m / (2.0 * a2 * a2)
            }
        };
        Some(l)
    }

    /// `f_alpha(z)`, zero outside the open support.
    pub fn pdf(&self, alpha: &[f64], z: f64) -> f64 {
        match self.log_pdf(alpha, z) {
            Some(l) => l.exp(),
            None => 0.0,
        }
    }

    /// All first and second partial derivatives of `log f_alpha(z)`, or
    /// `None` when `z` is outside the open support.
    pub fn log_pdf_derivs(&self, alpha: &[f64], z: f64) -> Option<LogPdfDerivs> {
        let (a1, a2) = (alpha[0], alpha[1]);
        if self.support() == SupportKind::PositiveHalfLine && z <= 0.0 {
            return None;
        }
        let d = match self.kind {
            DensityKind::Normal => {
                let s2 = a2 * a2;
                let s3 = s2 * a2;
                let s4 = s2 * s2;
                let m = z - a1;
                LogPdfDerivs {
                    lz: -m / s2,
                    lzz: -1.0 / s2,
                    la: [m / s2, -1.0 / a2 + m * m / s3],
                    lza: [1.0 / s2, 2.0 * m / s3],
                    laa: [
                        [-1.0 / s2, -2.0 * m / s3],
                        [-2.0 * m / s3, 1.0 / s2 - 3.0 * m * m / s4],
                    ],
                }
            }
            DensityKind::Gamma => LogPdfDerivs {
                lz: (a2 - 1.0) / z - 1.0 / a1,
                lzz: -(a2 - 1.0) / (z * z),
                la: [z / (a1 * a1) - a2 / a1, z.ln() - a1.ln() - digamma(a2)],
                lza: [1.0 / (a1 * a1), 1.0 / z],
                laa: [
                    [-2.0 * z / (a1 * a1 * a1) + a2 / (a1 * a1), -1.0 / a1],
                    [-1.0 / a1, -trigamma(a2)],
                ],
            },
            DensityKind::InverseGaussian => {
                let a1_2 = a1 * a1;
                let a1_3 = a1_2 * a1;
                let a1_4 = a1_2 * a1_2;
                let m = z - a1;
                LogPdfDerivs {
                    lz: -1.5 / z - a2 / (2.0 * a1_2) + a2 / (2.0 * z * z),
                    lzz: 1.5 / (z * z) - a2 / (z * z * z),
                    la: [
                        a2 * m / a1_3,
                        0.5 / a2 - m * m / (2.0 * a1_2 * z),
                    ],
                    lza: [a2 / a1_3, -0.5 / a1_2 + 0.5 / (z * z)],
                    laa: [
                        [-a2 * (3.0 * z - 2.0 * a1) / a1_4, m / a1_3],
                        [m / a1_3, -0.5 / (a2 * a2)],
                    ],
                }
            }
            DensityKind::Weibull => {
                let lr = z.ln() - a1.ln();
                let w = (a2 * lr).exp(); // (z/a1)^a2
                LogPdfDerivs {
                    lz: (a2 - 1.0) / z - a2 * w / z,
                    lzz: -(a2 - 1.0) * (1.0 + a2 * w) / (z * z),
                    la: [(a2 / a1) * (w - 1.0), 1.0 / a2 + lr * (1.0 - w)],
                    lza: [
                        a2 * a2 * w / (a1 * z),
                        (1.0 - w * (1.0 + a2 * lr)) / z,
                    ],
                    laa: [
                        [
                            -(a2 / (a1 * a1)) * ((1.0 + a2) * w - 1.0),
                            (w - 1.0) / a1 + (a2 / a1) * w * lr,
                        ],
                        [
                            (w - 1.0) / a1 + (a2 / a1) * w * lr,
                            -1.0 / (a2 * a2) - w * lr * lr,
                        ],
                    ],
                }
            }
            DensityKind::LogNormal => {
                let s2 = a2 * a2;
                let s3 = s2 * a2;
                let s4 = s2 * s2;
                let m = z.ln() - a1;
                let z2 = z * z;
                LogPdfDerivs {
                    lz: -1.0 / z - m / (s2 * z),
                    lzz: 1.0 / z2 + (m - 1.0) / (s2 * z2),
                    la: [m / s2, -1.0 / a2 + m * m / s3],
                    lza: [1.0 / (s2 * z), 2.0 * m / (s3 * z)],
                    laa: [
                        [-1.0 / s2, -2.0 * m / s3],
                        [-2.0 * m / s3, 1.0 / s2 - 3.0 * m * m / s4],
                    ],
                }
            }
        };
        Some(d)
    }

    /// Draws one mark.
    pub fn sample<R: Rng + ?Sized>(&self, alpha: &[f64], rng: &mut R) -> f64 {
        let (a1, a2) = (alpha[0], alpha[1]);
        match self.kind {
            DensityKind::Normal => rand_distr::Normal::new(a1, a2)
                .expect("admissible normal parameters")
                .sample(rng),
            DensityKind::Gamma => rand_distr::Gamma::new(a2, a1)
                .expect("admissible gamma parameters")
                .sample(rng),
            DensityKind::InverseGaussian => rand_distr::InverseGaussian::new(a1, a2)
                .expect("admissible inverse Gaussian parameters")
                .sample(rng),
            DensityKind::Weibull => rand_distr::Weibull::new(a1, a2)
                .expect("admissible weibull parameters")
                .sample(rng),
            DensityKind::LogNormal => rand_distr::LogNormal::new(a1, a2)
                .expect("admissible lognormal parameters")
                .sample(rng),
        }
    }

    /// Location and scale of the bulk of the family's mass, used to place
    /// quadrature panel cuts so a concentrated density inside a wide
    /// integration interval is never missed by sparse initial sampling.
    pub(crate) fn bulk_anchor(&self, alpha: &[f64]) -> (f64, f64) {
        let (a1, a2) = (alpha[0], alpha[1]);
        match self.kind {
            DensityKind::Normal => (a1, a2),
            // scale a1, shape a2: mean a1*a2, sd a1*sqrt(a2)
            DensityKind::Gamma => (a1 * a2, a1 * a2.sqrt()),
            // mean a1, shape a2: var a1^3/a2
            DensityKind::InverseGaussian => (a1, (a1.powi(3) / a2).sqrt()),
            // scale a1, shape a2: mass lives within a few scales
            DensityKind::Weibull => (a1, a1),
            DensityKind::LogNormal => {
                let mean = (a1 + 0.5 * a2 * a2).exp();
                let sd = mean * (a2 * a2).exp_m1().sqrt();
                (mean, sd)
            }
        }
    }

    /// Probability mass of `{ |z| <= t }` under the family, by adaptive
    /// quadrature (used by regime-ladder diagnostics and tests).
    pub fn mass_within(&self, alpha: &[f64], t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        let (lo, hi) = match self.support() {
            SupportKind::PositiveHalfLine => (0.0, t),
            SupportKind::WholeLine => (-t, t),
        };
        // Panel cuts anchored at the bulk of the mass: a recursive rule that
        // starts from the whole interval would see near-zero values at its
        // first few sample points whenever `t` is much larger than the
        // density's scale and terminate early with the needle missed.
        let (center, scale) = self.bulk_anchor(alpha);
        let mut cuts = vec![lo, hi];
        for k in [-40.0, -20.0, -10.0, -5.0, -2.0, 0.0, 2.0, 5.0, 10.0, 20.0, 40.0] {
            let p = center + k * scale;
            if p > lo && p < hi {
                cuts.push(p);
            }
        }
        cuts.sort_by(f64::total_cmp);
        let mut mass = 0.0;
        for pair in cuts.windows(2) {
            mass += adaptive_simpson(|z| self.pdf(alpha, z), pair[0], pair[1], 1e-13, 60)?;
        }
        Ok(mass)
    }
}

const LN_2PI: f64 = 1.837_877_066_409_345_6;

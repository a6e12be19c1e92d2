//! Coefficient specifications for drift, diffusion, and jump scaling.
//!
//! Each specification is a small serializable enum exposing the coefficient
//! value together with its first and second derivatives in the corresponding
//! parameter block. The jump coefficient additionally reports how many
//! trailing entries of the jump parameter vector it consumes beyond the
//! density parameters.

use serde::{Deserialize, Serialize};

/// Drift coefficient `a(x, mu)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DriftSpec {
    /// `a(x, mu) = -mu_1 * x` (linear pull toward the origin).
    Linear,
    /// `a(x, mu) = mu_1 * (mu_2 - x)` (mean reversion toward `mu_2`).
    MeanReversion,
    /// `a(x, mu) = mu_1` (state-independent drift).
    Constant,
}

impl DriftSpec {
    pub fn dim(&self) -> usize {
        match self {
            DriftSpec::Linear | DriftSpec::Constant => 1,
            DriftSpec::MeanReversion => 2,
        }
    }

    pub fn value(&self, x: f64, mu: &[f64]) -> f64 {
        match self {
            DriftSpec::Linear => -mu[0] * x,
            DriftSpec::MeanReversion => mu[0] * (mu[1] - x),
            DriftSpec::Constant => mu[0],
        }
    }

    /// Gradient in `mu`.
    pub fn grad(&self, x: f64, mu: &[f64]) -> Vec<f64> {
        match self {
            DriftSpec::Linear => vec![-x],
            DriftSpec::MeanReversion => vec![mu[1] - x, mu[0]],
            DriftSpec::Constant => vec![1.0],
        }
    }

    /// Hessian in `mu` (row-major `dim x dim`).
    pub fn hess(&self, _x: f64, _mu: &[f64]) -> Vec<f64> {
        match self {
            DriftSpec::Linear | DriftSpec::Constant => vec![0.0],
            DriftSpec::MeanReversion => vec![0.0, 1.0, 1.0, 0.0],
        }
    }
}

/// Diffusion coefficient `b(x, sigma)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DiffusionSpec {
    /// `b(x, sigma) = sigma_1`.
    Constant,
    /// `b(x, sigma) = sigma_1 + sigma_2 * x^2`.
    Affine,
    /// `b(x, sigma) = exp(sigma_1 + sigma_2 * x)` (exercises a non-zero
    /// second derivative in `sigma`).
    Exp,
}

impl DiffusionSpec {
    pub fn dim(&self) -> usize {
        match self {
            DiffusionSpec::Constant => 1,
            DiffusionSpec::Affine | DiffusionSpec::Exp => 2,
        }
    }

    pub fn value(&self, x: f64, sigma: &[f64]) -> f64 {
        match self {
            DiffusionSpec::Constant => sigma[0],
            DiffusionSpec::Affine => sigma[0] + sigma[1] * x * x,
            DiffusionSpec::Exp => (sigma[0] + sigma[1] * x).exp(),
        }
    }

    /// Gradient in `sigma`.
    pub fn grad(&self, x: f64, sigma: &[f64]) -> Vec<f64> {
        match self {
            DiffusionSpec::Constant => vec![1.0],
            DiffusionSpec::Affine => vec![1.0, x * x],
            DiffusionSpec::Exp => {
                let b = self.value(x, sigma);
                vec![b, b * x]
            }
        }
    }

    /// Hessian in `sigma` (row-major `dim x dim`).
    pub fn hess(&self, x: f64, sigma: &[f64]) -> Vec<f64> {
        match self {
            DiffusionSpec::Constant => vec![0.0],
            DiffusionSpec::Affine => vec![0.0; 4],
            DiffusionSpec::Exp => {
                let b = self.value(x, sigma);
                vec![b, b * x, b * x, b * x * x]
            }
        }
    }
}

/// Jump coefficient `c(x, alpha)`.
///
/// The parameterized variants reference an entry of the jump parameter
/// vector by index; indices at or beyond the density family's own parameter
/// count extend the jump block (`d3 = max(family dim, index + 1)`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum JumpCoeffSpec {
    /// `c(x, alpha) = value` (state- and parameter-free).
    Const { value: f64 },
    /// `c(x, alpha) = base * (1 + x^2)` (state-dependent, parameter-free).
    StateScaled { base: f64 },
    /// `c(x, alpha) = alpha_{index+1}`.
    Param { index: usize },
    /// `c(x, alpha) = exp(alpha_{index+1})` (exercises a non-zero second
    /// derivative in `alpha`).
    ExpParam { index: usize },
}

impl JumpCoeffSpec {
    /// Minimum length of the jump parameter vector this coefficient needs.
    pub fn min_alpha_len(&self) -> usize {
        match self {
            JumpCoeffSpec::Const { .. } | JumpCoeffSpec::StateScaled { .. } => 0,
            JumpCoeffSpec::Param { index } | JumpCoeffSpec::ExpParam { index } => index + 1,
        }
    }

    pub fn value(&self, x: f64, alpha: &[f64]) -> f64 {
        match self {
            JumpCoeffSpec::Const { value } => *value,
            JumpCoeffSpec::StateScaled { base } => base * (1.0 + x * x),
            JumpCoeffSpec::Param { index } => alpha[*index],
            JumpCoeffSpec::ExpParam { index } => alpha[*index].exp(),
        }
    }

    /// Gradient in `alpha`, written into a zeroed buffer of length `d3`.
    pub fn grad_into(&self, _x: f64, alpha: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        match self {
            JumpCoeffSpec::Const { .. } | JumpCoeffSpec::StateScaled { .. } => {}
            JumpCoeffSpec::Param { index } => out[*index] = 1.0,
            JumpCoeffSpec::ExpParam { index } => out[*index] = alpha[*index].exp(),
        }
    }

    /// Hessian in `alpha`, written into a zeroed row-major `d3 x d3` buffer.
    pub fn hess_into(&self, _x: f64, alpha: &[f64], d3: usize, out: &mut [f64]) {
        out.fill(0.0);
        match self {
            JumpCoeffSpec::Const { .. }
            | JumpCoeffSpec::StateScaled { .. }
            | JumpCoeffSpec::Param { .. } => {}
            JumpCoeffSpec::ExpParam { index } => {
                out[index * d3 + index] = alpha[*index].exp();
            }
        }
    }
}

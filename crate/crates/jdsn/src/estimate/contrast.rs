//! Quasi-likelihood contrast functions, their analytic gradients, the
//! normalized score components, and second-derivative blocks.
//!
//! With `r_k(mu) = Delta_k X - a(X_{t_{k-1}}, mu) / n` and
//! `b_k = b(X_{t_{k-1}}, sigma)`, the continuous-part contrast over the
//! continuous-labeled index set `C` is
//!
//! ```text
//! Psi1(mu, sigma) = -(1/n) sum_C [ n r_k^2 / (2 eps^2 b_k^2) + (1/2) ln b_k^2 ]
//! ```
//!
//! and the jump-part contrast over the jump-labeled set `D`, scaled by a
//! caller-chosen positive `lambda_scale`, is
//!
//! ```text
//! Psi2(alpha) = (1/lambda_scale) sum_D psi(X_{t_{k-1}}, Delta_k X / eps, alpha)
//! ```
//!
//! `psi` is the total-function jump kernel: increments whose rescaled value
//! falls outside the mark support contribute zero, and their derivative
//! contributions are likewise zero (the kernel is locally constant there).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::estimate::filter::FilterLabels;
use crate::model::{ModelSpec, ParameterPoint, RegimeConfig};
use crate::simulate::ObservationRecord;
use crate::Error as E;

fn check_labels(obs: &ObservationRecord, labels: &FilterLabels) -> Result<()> {
    if labels.jump.len() != obs.n {
        return Err(E::Config(format!(
            "filter labels cover {} increments but the record has {}",
            labels.jump.len(),
            obs.n
        )));
    }
    if !(obs.epsilon > 0.0) {
        return Err(E::Config("contrast evaluation requires epsilon > 0".into()));
    }
    Ok(())
}

/// Continuous-part contrast `Psi1(mu, sigma)`.
pub fn contrast_continuous(
    obs: &ObservationRecord,
    mu: &[f64],
    sigma: &[f64],
    labels: &FilterLabels,
    model: &ModelSpec,
) -> Result<f64> {
    check_labels(obs, labels)?;
    let n = obs.n as f64;
    let eps2 = obs.epsilon * obs.epsilon;
    let mut acc = 0.0;
    for k in 0..obs.n {
        if labels.jump[k] {
            continue;
        }
        let x = obs.left(k);
        let b = model.b(x, sigma);
        let b2 = b * b;
        if !(b2 > 0.0) || !b2.is_finite() {
            return Err(Error::Numerical(format!(
                "diffusion coefficient degenerate (b = {b}) at x = {x}"
            )));
        }
        let r = obs.increment(k) - model.a(x, mu) / n;
        acc += n * r * r / (2.0 * eps2 * b2) + 0.5 * b2.ln();
    }
    Ok(-acc / n)
}

/// Jump-part contrast `Psi2(alpha)` with explicit scale `lambda_scale > 0`.
pub fn contrast_jump(
    obs: &ObservationRecord,
    alpha: &[f64],
    labels: &FilterLabels,
    model: &ModelSpec,
    lambda_scale: f64,
) -> Result<f64> {
    check_labels(obs, labels)?;
    if !(lambda_scale > 0.0) || !lambda_scale.is_finite() {
        return Err(E::Config(format!(
            "jump contrast requires a positive lambda scale, got {lambda_scale}"
        )));
    }
    let mut acc = 0.0;
    for k in labels.jump_indices() {
        acc += model.psi(obs.left(k), obs.increment(k) / obs.epsilon, alpha);
    }
    Ok(acc / lambda_scale)
}

/// Full contrast `Psi1 + Psi2`.
pub fn contrast_full(
    obs: &ObservationRecord,
    theta: &ParameterPoint,
    labels: &FilterLabels,
    model: &ModelSpec,
    lambda_scale: f64,
) -> Result<f64> {
    Ok(contrast_continuous(obs, &theta.mu, &theta.sigma, labels, model)?
        + contrast_jump(obs, &theta.alpha, labels, model, lambda_scale)?)
}

/// Analytic gradient of `Psi1` in `(mu, sigma)`, concatenated.
pub fn grad_continuous(
    obs: &ObservationRecord,
    mu: &[f64],
    sigma: &[f64],
    labels: &FilterLabels,
    model: &ModelSpec,
) -> Result<Vec<f64>> {
    check_labels(obs, labels)?;
    let (d1, d2) = (model.d1(), model.d2());
    let n = obs.n as f64;
    let eps2 = obs.epsilon * obs.epsilon;
    let mut g = vec![0.0; d1 + d2];
    for k in 0..obs.n {
        if labels.jump[k] {
            continue;
        }
        let x = obs.left(k);
        let b = model.b(x, sigma);
        let b2 = b * b;
        if !(b2 > 0.0) || !b2.is_finite() {
            return Err(Error::Numerical(format!(
                "diffusion coefficient degenerate (b = {b}) at x = {x}"
            )));
        }
        let r = obs.increment(k) - model.a(x, mu) / n;
        let ag = model.drift.grad(x, mu);
        let bg = model.diffusion.grad(x, sigma);
        let w = -n * r * r / (eps2 * b2) + 1.0;
        for i in 0..d1 {
            g[i] += r * ag[i] / b2 / (n * eps2);
        }
        for i in 0..d2 {
            g[d1 + i] -= w * (bg[i] / b) / n;
        }
    }
    Ok(g)
}

/// Analytic gradient of `Psi2` in `alpha`. Jump-labeled increments on the
/// kernel's zero branch contribute nothing.
pub fn grad_jump(
    obs: &ObservationRecord,
    alpha: &[f64],
    labels: &FilterLabels,
    model: &ModelSpec,
    lambda_scale: f64,
) -> Result<Vec<f64>> {
    check_labels(obs, labels)?;
    if !(lambda_scale > 0.0) || !lambda_scale.is_finite() {
        return Err(E::Config(format!(
            "jump contrast requires a positive lambda scale, got {lambda_scale}"
        )));
    }
    let d3 = model.d3();
    let mut g = vec![0.0; d3];
    for k in labels.jump_indices() {
        match model.psi_dalpha(obs.left(k), obs.increment(k) / obs.epsilon, alpha) {
            Ok(pg) => {
                for i in 0..d3 {
                    g[i] += pg[i];
                }
            }
            Err(Error::Boundary(_)) => {}
            Err(e) => return Err(e),
        }
    }
    for v in g.iter_mut() {
        *v /= lambda_scale;
    }
    Ok(g)
}

/// Per-increment normalized score components at a parameter point.
///
/// Column sums recover the scaled contrast gradients:
/// `sum_k xi1[k][i] = eps * n * d Psi1 / d mu_i`,
/// `sum_k xi2[k][i] = sqrt(n) * d Psi1 / d sigma_i`, and
/// `sum_k xi3[k][i] = sqrt(lambda) * d Psi2 / d alpha_i` with
/// `lambda_scale = lambda` (the regime's true intensity).
#[derive(Clone, Debug)]
pub struct ScoreComponents {
    pub xi1: Vec<Vec<f64>>,
    pub xi2: Vec<Vec<f64>>,
    pub xi3: Vec<Vec<f64>>,
}

pub fn score_components(
    obs: &ObservationRecord,
    theta: &ParameterPoint,
    labels: &FilterLabels,
    model: &ModelSpec,
    regime: &RegimeConfig,
) -> Result<ScoreComponents> {
    check_labels(obs, labels)?;
    let lambda = regime.lambda;
    if !(lambda > 0.0) {
        return Err(E::Config("score components require lambda > 0".into()));
    }
    let (d1, d2, d3) = model.dims();
    let n = obs.n as f64;
    let eps = obs.epsilon;
    let sqrt_n = n.sqrt();
    let sqrt_lambda = lambda.sqrt();
    let mut xi1 = vec![vec![0.0; d1]; obs.n];
    let mut xi2 = vec![vec![0.0; d2]; obs.n];
    let mut xi3 = vec![vec![0.0; d3]; obs.n];
    for k in 0..obs.n {
        let x = obs.left(k);
        if !labels.jump[k] {
            let b = model.b(x, &theta.sigma);
            let b2 = b * b;
            if !(b2 > 0.0) || !b2.is_finite() {
                return Err(Error::Numerical(format!(
                    "diffusion coefficient degenerate (b = {b}) at x = {x}"
                )));
            }
            let r = obs.increment(k) - model.a(x, &theta.mu) / n;
            let ag = model.drift.grad(x, &theta.mu);
            let bg = model.diffusion.grad(x, &theta.sigma);
            let w = -n * r * r / (eps * eps * b2) + 1.0;
            for i in 0..d1 {
                xi1[k][i] = r * ag[i] / b2 / eps;
            }
            for i in 0..d2 {
                xi2[k][i] = -w * (bg[i] / b) / sqrt_n;
            }
        } else {
            match model.psi_dalpha(x, obs.increment(k) / eps, &theta.alpha) {
                Ok(pg) => {
                    for i in 0..d3 {
                        xi3[k][i] = pg[i] / sqrt_lambda;
                    }
                }
                Err(Error::Boundary(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(ScoreComponents { xi1, xi2, xi3 })
}

/// Unscaled second-derivative blocks of the contrast.
///
/// `mu_mu`, `mu_sigma`, `sigma_sigma` are second derivatives of `Psi1`;
/// `alpha_alpha` is the second derivative of `Psi2` at scale `lambda_scale`.
#[derive(Clone, Debug)]
pub struct HessianBlocks {
    pub mu_mu: DMatrix<f64>,
    pub mu_sigma: DMatrix<f64>,
    pub sigma_sigma: DMatrix<f64>,
    pub alpha_alpha: DMatrix<f64>,
}

pub fn hessian_blocks(
    obs: &ObservationRecord,
    theta: &ParameterPoint,
    labels: &FilterLabels,
    model: &ModelSpec,
    lambda_scale: f64,
) -> Result<HessianBlocks> {
    check_labels(obs, labels)?;
    if !(lambda_scale > 0.0) || !lambda_scale.is_finite() {
        return Err(E::Config(format!(
            "Hessian blocks require a positive lambda scale, got {lambda_scale}"
        )));
    }
    let (d1, d2, d3) = model.dims();
    let n = obs.n as f64;
    let eps2 = obs.epsilon * obs.epsilon;
    let mut h11 = DMatrix::zeros(d1, d1);
    let mut h12 = DMatrix::zeros(d1, d2);
    let mut h22 = DMatrix::zeros(d2, d2);
    let mut h33 = DMatrix::zeros(d3, d3);
    for k in 0..obs.n {
        let x = obs.left(k);
        if !labels.jump[k] {
            let b = model.b(x, &theta.sigma);
            let b2 = b * b;
            if !(b2 > 0.0) || !b2.is_finite() {
                return Err(Error::Numerical(format!(
                    "diffusion coefficient degenerate (b = {b}) at x = {x}"
                )));
            }
            let r = obs.increment(k) - model.a(x, &theta.mu) / n;
            let ag = model.drift.grad(x, &theta.mu);
            let ah = model.drift.hess(x, &theta.mu);
            let bg = model.diffusion.grad(x, &theta.sigma);
            let bh = model.diffusion.hess(x, &theta.sigma);
            let w = -n * r * r / (eps2 * b2) + 1.0;
            for i in 0..d1 {
                for j in 0..d1 {
                    h11[(i, j)] +=
                        (r * ah[i * d1 + j] - ag[i] * ag[j] / n) / b2 / (n * eps2);
                }
                for j in 0..d2 {
                    h12[(i, j)] -= 2.0 * r * ag[i] * bg[j] / (b2 * b) / (n * eps2);
                }
            }
            for i in 0..d2 {
                for j in 0..d2 {
                    h22[(i, j)] -= w * (bh[i * d2 + j] / b - bg[i] * bg[j] / b2) / n
                        + 2.0 * r * r * bg[i] * bg[j] / (b2 * b2) / eps2;
                }
            }
        } else {
            match model.psi_d2(x, obs.increment(k) / obs.epsilon, &theta.alpha) {
                Ok(s) => {
                    for i in 0..d3 {
                        for j in 0..d3 {
                            h33[(i, j)] += s.dalpha2[i * d3 + j];
                        }
                    }
                }
                Err(Error::Boundary(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    h33 /= lambda_scale;
    Ok(HessianBlocks { mu_mu: h11, mu_sigma: h12, sigma_sigma: h22, alpha_alpha: h33 })
}

//! Limit information matrices by quadrature, and the observed information.
//!
//! In the joint small-noise / high-frequency limit the standardized
//! estimation errors are asymptotically normal with covariance given by the
//! inverse of a block-diagonal information matrix whose blocks are integrals
//! along the noise-free limit path `x_t` (the solution of
//! `dx = a(x, mu0) dt`, `x_0 = X_0`):
//!
//! ```text
//! I1[i][j] = ∫_0^1 (da/dmu_i)(da/dmu_j) / b^2           (x_t) dt
//! I2[i][j] = 2 ∫_0^1 (db/dsigma_i)(db/dsigma_j) / b^2   (x_t) dt
//! I3[i][j] = ∫_0^1 E[ psi_alpha_i psi_alpha_j (x_t, c(x_t, alpha0) Z, alpha0) ] dt
//! ```
//!
//! where `Z` is distributed according to the mark density and `psi` is the
//! jump log-likelihood kernel. The outer time integrals use composite Simpson
//! on the limit-path grid; the inner mark expectations use adaptive Simpson
//! with tail truncation chosen so that the neglected mark mass is below a
//! configurable budget, bulk-anchored panel cuts so concentrated densities
//! are never missed, and a log substitution on panels spanning many orders of
//! magnitude near a half-line support's origin.
//!
//! [`observed_information`] is the finite-sample counterpart: per-block
//! rate-scaled second derivatives of the contrast, which approximate the
//! *negative* of the assembled limit information at the true parameter.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::estimate::{hessian_blocks, FilterLabels};
use crate::model::{JumpDensityFamily, ModelSpec, ParameterPoint, SupportKind};
use crate::numeric::quad::{adaptive_simpson, adaptive_simpson_log};
use crate::simulate::{solve_limit_path, ObservationRecord};

/// Quadrature controls for the information integrals.
#[derive(Clone, Copy, Debug)]
pub struct QuadSpec {
    /// Tolerance for each one-dimensional integral. The information entries
    /// are order one, so this is applied as an absolute per-panel tolerance.
    pub rel_tol: f64,
    /// Mark-density mass allowed beyond the truncation point of the inner
    /// expectations.
    pub tail_mass: f64,
    /// Recursion depth limit for the adaptive rule.
    pub max_depth: u32,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-9, tail_mass: 1e-10, max_depth: 60 }
    }
}

impl QuadSpec {
    fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::Config(format!(
                "quadrature tolerance must be positive and finite, got {}",
                self.rel_tol
            )));
        }
        if !(self.tail_mass >= 1e-11 && self.tail_mass <= 0.1) {
            return Err(Error::Config(format!(
                "quadrature tail mass must lie in [1e-11, 0.1], got {}",
                self.tail_mass
            )));
        }
        if self.max_depth < 10 {
            return Err(Error::Config(format!(
                "quadrature depth limit must be at least 10, got {}",
                self.max_depth
            )));
        }
        Ok(())
    }
}

/// The limit information blocks and their block-diagonal assembly.
#[derive(Clone, Debug)]
pub struct FisherInformation {
    /// Drift block `I1`, `d1 x d1`.
    pub i_mu: DMatrix<f64>,
    /// Diffusion block `I2`, `d2 x d2`.
    pub i_sigma: DMatrix<f64>,
    /// Jump block `I3`, `d3 x d3`.
    pub i_alpha: DMatrix<f64>,
    /// Block-diagonal `d x d` matrix, `d = d1 + d2 + d3`.
    pub assembled: DMatrix<f64>,
    pub dims: (usize, usize, usize),
}

impl FisherInformation {
    /// Renders the assembled matrix as CSV: one comment line locating the
    /// blocks, a `c0,..,c{d-1}` header, and one full-precision row per row of
    /// the matrix.
    pub fn to_csv(&self) -> String {
        let (d1, d2, d3) = self.dims;
        let d = d1 + d2 + d3;
        let mut out = format!(
            "# limit information; blocks: mu cols [0,{}), sigma cols [{},{}), alpha cols [{},{})\n",
            d1,
            d1,
            d1 + d2,
            d1 + d2,
            d
        );
        let header: Vec<String> = (0..d).map(|j| format!("c{j}")).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for i in 0..d {
            let row: Vec<String> =
                (0..d).map(|j| format!("{:.16e}", self.assembled[(i, j)])).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Panel offsets (in units of the family's bulk scale) used to seed the
/// adaptive rule, mirroring the mass computation in the density module with
/// extra fractional offsets: expectation integrands change sign inside the
/// bulk, so panels there need interior structure.
const PANEL_OFFSETS: [f64; 15] = [
    -40.0, -20.0, -10.0, -5.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0,
];

/// Smallest positive mark argument used on half-line supports; the mass (and
/// kernel-weighted mass) below it is negligible for every admissible family.
const HALF_LINE_FLOOR: f64 = 1e-14;

/// Truncation point for the inner expectations: doubles a bulk-anchored
/// radius until the mark mass outside is below `tail_mass`, then doubles once
/// more so that polynomially growing kernels stay covered.
fn integration_cut(density: &JumpDensityFamily, alpha: &[f64], tail_mass: f64) -> Result<f64> {
    let (center, scale) = density.bulk_anchor(alpha);
    let mut t = center.abs() + 10.0 * scale.max(1e-12);
    for _ in 0..64 {
        let tail = 1.0 - density.mass_within(alpha, t)?;
        if tail <= tail_mass {
            return Ok(2.0 * t);
        }
        t *= 2.0;
    }
    Err(Error::Quadrature(format!(
        "no truncation point with tail mass <= {tail_mass:e} found for family '{}'",
        density.id()
    )))
}

/// Effective integration range for expectations under the mark density.
fn integration_range(
    density: &JumpDensityFamily,
    alpha: &[f64],
    quad: &QuadSpec,
) -> Result<(f64, f64)> {
    let cut = integration_cut(density, alpha, quad.tail_mass)?;
    Ok(match density.support() {
        SupportKind::PositiveHalfLine => (HALF_LINE_FLOOR, cut),
        SupportKind::WholeLine => (-cut, cut),
    })
}

/// `∫_lo^hi g(z) f_alpha(z) dz` over bulk-anchored panels.
fn expectation_on<G: FnMut(f64) -> f64>(
    density: &JumpDensityFamily,
    alpha: &[f64],
    lo: f64,
    hi: f64,
    quad: &QuadSpec,
    mut g: G,
) -> Result<f64> {
    let (center, scale) = density.bulk_anchor(alpha);
    let mut cuts = vec![lo, hi];
    for k in PANEL_OFFSETS {
        let p = center + k * scale;
        if p > lo && p < hi {
            cuts.push(p);
        }
    }
    cuts.sort_by(f64::total_cmp);
    // A panel reaching down to the support floor spans many orders of
    // magnitude and is integrated in log coordinates — but never in one
    // piece: a single log panel over dozens of decades can sample only dead
    // zeros (the density vanishes near the floor, and the integrand may
    // vanish at the panel's upper edge too) and falsely converge to zero.
    // Chunks of at most three decades always straddle the rising edge of a
    // half-line density with an informative midpoint.
    let mut pieces: Vec<(f64, f64, bool)> = Vec::new();
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a >= b {
            continue;
        }
        if a > 0.0 && b > 1e3 * a {
            let mut lo2 = a;
            while b > 1e3 * lo2 {
                pieces.push((lo2, lo2 * 1e3, true));
                lo2 *= 1e3;
            }
            pieces.push((lo2, b, true));
        } else {
            pieces.push((a, b, false));
        }
    }
    let tol = 0.1 * quad.rel_tol;
    let mut total = 0.0;
    for (a, b, log) in pieces {
        let mut integrand = |z: f64| density.pdf(alpha, z) * g(z);
        total += if log {
            adaptive_simpson_log(&mut integrand, a, b, tol, quad.max_depth)?
        } else {
            adaptive_simpson(&mut integrand, a, b, tol, quad.max_depth)?
        };
    }
    Ok(total)
}

/// Expectation `E[g(Z)]` under the mark density, by adaptive quadrature with
/// tail truncation controlled by `quad`.
pub fn mark_expectation<G: FnMut(f64) -> f64>(
    density: &JumpDensityFamily,
    alpha: &[f64],
    quad: &QuadSpec,
    g: G,
) -> Result<f64> {
    quad.validate()?;
    density.admissible(alpha)?;
    let (lo, hi) = integration_range(density, alpha, quad)?;
    expectation_on(density, alpha, lo, hi, quad, g)
}

/// The jump-block integrand at a fixed state: the `d3 x d3` matrix
/// `M(x) = E[ psi_alpha psi_alpha^T (x, c(x, alpha) Z, alpha) ]`.
fn mark_information_on(
    model: &ModelSpec,
    x: f64,
    alpha: &[f64],
    lo: f64,
    hi: f64,
    quad: &QuadSpec,
) -> Result<DMatrix<f64>> {
    let d3 = model.d3();
    let c = model.c(x, alpha);
    if c == 0.0 || !c.is_finite() {
        return Err(Error::Numerical(format!(
            "jump coefficient is {c} at x = {x}; the jump information is undefined there"
        )));
    }
    let mut m = DMatrix::zeros(d3, d3);
    for i in 0..d3 {
        for j in i..d3 {
            let val = expectation_on(&model.density, alpha, lo, hi, quad, |z| {
                match model.psi_dalpha(x, c * z, alpha) {
                    Ok(pg) => pg[i] * pg[j],
                    // Interior z with nonzero c cannot hit a boundary; if it
                    // ever does, poison the integral so the quadrature error
                    // carries the abscissa.
                    Err(_) => f64::NAN,
                }
            })?;
            m[(i, j)] = val;
            m[(j, i)] = val;
        }
    }
    Ok(m)
}

/// [`mark_information_on`] with the integration range derived from `quad`.
pub fn mark_information_at(
    model: &ModelSpec,
    x: f64,
    alpha: &[f64],
    quad: &QuadSpec,
) -> Result<DMatrix<f64>> {
    quad.validate()?;
    model.density.admissible(alpha)?;
    let (lo, hi) = integration_range(&model.density, alpha, quad)?;
    mark_information_on(model, x, alpha, lo, hi, quad)
}

/// Computes the limit information blocks at `theta0` by quadrature along the
/// noise-free limit path.
///
/// `time_steps` is the number of Simpson intervals for the outer time
/// integrals (rounded up to an even count of at least two); the limit path is
/// solved on exactly that grid. The inner mark expectations are memoized per
/// distinct value of the jump coefficient along the path, so models whose
/// jump coefficient does not depend on the state pay for a single inner
/// integration.
pub fn fisher_information(
    model: &ModelSpec,
    theta0: &ParameterPoint,
    time_steps: usize,
    quad: &QuadSpec,
) -> Result<FisherInformation> {
    quad.validate()?;
    model.validate_theta(theta0)?;
    let m = {
        let t = time_steps.max(2);
        if t % 2 == 1 {
            t + 1
        } else {
            t
        }
    };
    let path = solve_limit_path(model, &theta0.mu, m + 1)?;
    let (d1, d2, d3) = model.dims();
    let h = 1.0 / m as f64;

    let (zlo, zhi) = integration_range(&model.density, &theta0.alpha, quad)?;
    let mut memo: HashMap<u64, DMatrix<f64>> = HashMap::new();

    let mut i_mu = DMatrix::zeros(d1, d1);
    let mut i_sigma = DMatrix::zeros(d2, d2);
    let mut i_alpha = DMatrix::zeros(d3, d3);
    for (idx, &x) in path.values.iter().enumerate() {
        let w = if idx == 0 || idx == m {
            h / 3.0
        } else if idx % 2 == 1 {
            4.0 * h / 3.0
        } else {
            2.0 * h / 3.0
        };
        let b = model.b(x, &theta0.sigma);
        let b2 = b * b;
        if !(b2 > 0.0) || !b2.is_finite() {
            return Err(Error::Numerical(format!(
                "diffusion coefficient degenerate (b = {b}) on the limit path at x = {x}"
            )));
        }
        let ag = model.drift.grad(x, &theta0.mu);
        let bg = model.diffusion.grad(x, &theta0.sigma);
        for i in 0..d1 {
            for j in 0..d1 {
                i_mu[(i, j)] += w * ag[i] * ag[j] / b2;
            }
        }
        for i in 0..d2 {
            for j in 0..d2 {
                i_sigma[(i, j)] += w * 2.0 * bg[i] * bg[j] / b2;
            }
        }
        let c = model.c(x, &theta0.alpha);
        if c == 0.0 || !c.is_finite() {
            return Err(Error::Numerical(format!(
                "jump coefficient is {c} on the limit path at x = {x}"
            )));
        }
        let key = c.to_bits();
        if !memo.contains_key(&key) {
            let mk = mark_information_on(model, x, &theta0.alpha, zlo, zhi, quad)?;
            memo.insert(key, mk);
        }
        let mk = &memo[&key];
        for i in 0..d3 {
            for j in 0..d3 {
                i_alpha[(i, j)] += w * mk[(i, j)];
            }
        }
    }

    let d = d1 + d2 + d3;
    let mut assembled = DMatrix::zeros(d, d);
    assembled.view_mut((0, 0), (d1, d1)).copy_from(&i_mu);
    assembled.view_mut((d1, d1), (d2, d2)).copy_from(&i_sigma);
    assembled.view_mut((d1 + d2, d1 + d2), (d3, d3)).copy_from(&i_alpha);
    Ok(FisherInformation { i_mu, i_sigma, i_alpha, assembled, dims: (d1, d2, d3) })
}

/// The observed information: per-block rate-scaled second derivatives of the
/// contrast at `theta`, with the jump block normalized by the estimated
/// intensity (the jump count, floored at one so an empty jump set degrades
/// gracefully instead of dividing by zero).
///
/// With `d = d1 + d2 + d3` and `s = eps^2 n`, the blocks are
///
/// ```text
/// C[mu,    mu]    = s * d2 Psi / dmu dmu
/// C[mu,    sigma] = s * d2 Psi / dmu dsigma
/// C[sigma, mu]    =     (d2 Psi / dmu dsigma)^T      (unscaled)
/// C[sigma, sigma] =     d2 Psi / dsigma dsigma
/// C[alpha, alpha] =     d2 Psi2 / dalpha dalpha      (at scale #jumps)
/// ```
///
/// and the (mu|sigma) x alpha blocks are exactly zero. Each diagonal block
/// approximates the negative of the corresponding limit information block at
/// the true parameter; the matrix is intentionally not symmetric because the
/// two cross blocks are scaled by the rates of their own rows.
pub fn observed_information(
    obs: &ObservationRecord,
    theta: &ParameterPoint,
    labels: &FilterLabels,
    model: &ModelSpec,
) -> Result<DMatrix<f64>> {
    let lambda_hat = (labels.n_jump as f64).max(1.0);
    let blocks = hessian_blocks(obs, theta, labels, model, lambda_hat)?;
    let (d1, d2, d3) = model.dims();
    let d = d1 + d2 + d3;
    let s = obs.epsilon * obs.epsilon * obs.n as f64;
    let mut c = DMatrix::zeros(d, d);
    c.view_mut((0, 0), (d1, d1)).copy_from(&(&blocks.mu_mu * s));
    c.view_mut((0, d1), (d1, d2)).copy_from(&(&blocks.mu_sigma * s));
    c.view_mut((d1, 0), (d2, d1)).copy_from(&blocks.mu_sigma.transpose());
    c.view_mut((d1, d1), (d2, d2)).copy_from(&blocks.sigma_sigma);
    c.view_mut((d1 + d2, d1 + d2), (d3, d3)).copy_from(&blocks.alpha_alpha);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::classify_increments;
    use crate::model::builtin;
    use crate::numeric::linalg::{check_positive_definite, inf_norm};
    use crate::numeric::rng::{chacha_from_u64, derive_child};
    use crate::simulate::simulate_path;
    use approx::assert_relative_eq;

    const FAMILIES: [&str; 5] = ["ou-gamma", "ou-normal", "ou-ig", "ou-weibull", "ou-lognormal"];

    #[test]
    fn ou_gamma_blocks_match_closed_forms() {
        let b = builtin("ou-gamma").unwrap();
        let info = fisher_information(&b.model, &b.theta0, 2000, &QuadSpec::default()).unwrap();
        // Drift -mu x from x0 = 1: limit path e^{-t}, so
        // I1 = ∫ e^{-2t} dt = (1 - e^{-2}) / 2.
        assert_relative_eq!(info.i_mu[(0, 0)], 0.43233235838169365, max_relative = 1e-6);
        // Unit diffusion with one multiplicative parameter: I2 = 2.
        assert_relative_eq!(info.i_sigma[(0, 0)], 2.0, max_relative = 1e-6);
        // Gamma marks, scale 1, shape 2, unit jump coefficient:
        //   E[(z - 2)^2] = 2,   E[(z - 2)(ln z - digamma(2))] = 1,
        //   Var(ln z) = trigamma(2) = pi^2/6 - 1.
        assert_relative_eq!(info.i_alpha[(0, 0)], 2.0, max_relative = 1e-6);
        assert_relative_eq!(info.i_alpha[(0, 1)], 1.0, max_relative = 1e-6);
        assert_relative_eq!(info.i_alpha[(1, 0)], 1.0, max_relative = 1e-6);
        assert_relative_eq!(
            info.i_alpha[(1, 1)],
            0.6449340668482264,
            max_relative = 1e-6
        );
        // The assembly is block diagonal in the declared order.
        assert_eq!(info.assembled.nrows(), 4);
        assert_eq!(info.assembled[(0, 0)], info.i_mu[(0, 0)]);
        assert_eq!(info.assembled[(1, 1)], info.i_sigma[(0, 0)]);
        assert_eq!(info.assembled[(2, 3)], info.i_alpha[(0, 1)]);
        assert_eq!(info.assembled[(0, 1)], 0.0);
        assert_eq!(info.assembled[(1, 2)], 0.0);
    }

    #[test]
    fn time_refinement_is_converged() {
        let b = builtin("ou-gamma").unwrap();
        let coarse = fisher_information(&b.model, &b.theta0, 500, &QuadSpec::default()).unwrap();
        let fine = fisher_information(&b.model, &b.theta0, 1000, &QuadSpec::default()).unwrap();
        let diff = &fine.assembled - &coarse.assembled;
        assert!(
            inf_norm(&diff) <= 1e-7 * inf_norm(&fine.assembled),
            "time-refinement residual too large: {:e}",
            inf_norm(&diff)
        );
    }

    #[test]
    fn assembled_information_is_positive_definite_for_all_builtins() {
        for id in FAMILIES {
            let b = builtin(id).unwrap();
            let info =
                fisher_information(&b.model, &b.theta0, 400, &QuadSpec::default()).unwrap();
            check_positive_definite(&info.assembled, 1e-10)
                .unwrap_or_else(|e| panic!("{id}: {e}"));
        }
    }

    #[test]
    fn mark_scores_have_zero_mean_for_all_builtins() {
        let quad = QuadSpec::default();
        for id in FAMILIES {
            let b = builtin(id).unwrap();
            let model = &b.model;
            let alpha = &b.theta0.alpha;
            let x = model.x0;
            let c = model.c(x, alpha);
            for j in 0..model.d3() {
                let mean = mark_expectation(&model.density, alpha, &quad, |z| {
                    model.psi_dalpha(x, c * z, alpha).map(|pg| pg[j]).unwrap_or(f64::NAN)
                })
                .unwrap();
                assert!(
                    mean.abs() <= 1e-6,
                    "{id}: mark score component {j} has mean {mean:e}"
                );
            }
        }
    }

    #[test]
    fn information_identity_holds() {
        // E[psi_alpha psi_alpha^T] = -E[psi_alphaalpha] under the mark
        // density at the true parameter.
        let quad = QuadSpec::default();
        for id in ["ou-gamma", "ou-normal"] {
            let b = builtin(id).unwrap();
            let model = &b.model;
            let alpha = &b.theta0.alpha;
            let x = model.x0;
            let c = model.c(x, alpha);
            let outer = mark_information_at(model, x, alpha, &quad).unwrap();
            let d3 = model.d3();
            for i in 0..d3 {
                for j in 0..d3 {
                    let neg_hess = mark_expectation(&model.density, alpha, &quad, |z| {
                        model
                            .psi_d2(x, c * z, alpha)
                            .map(|s| -s.dalpha2[i * d3 + j])
                            .unwrap_or(f64::NAN)
                    })
                    .unwrap();
                    assert!(
                        (outer[(i, j)] - neg_hess).abs() <= 1e-6,
                        "{id}: identity mismatch at ({i},{j}): {} vs {}",
                        outer[(i, j)],
                        neg_hess
                    );
                }
            }
        }
    }

    #[test]
    fn mark_information_matches_monte_carlo() {
        let quad = QuadSpec::default();
        for id in FAMILIES {
            let b = builtin(id).unwrap();
            let model = &b.model;
            let alpha = &b.theta0.alpha;
            let x = model.x0;
            let c = model.c(x, alpha);
            let quad_m = mark_information_at(model, x, alpha, &quad).unwrap();
            let d3 = model.d3();
            let reps = 200_000usize;
            let mut rng = chacha_from_u64(derive_child(0xF15E, 7, 0));
            let mut sums = vec![0.0; d3 * d3];
            let mut sq_sums = vec![0.0; d3 * d3];
            for _ in 0..reps {
                let z: f64 = model.density.sample(alpha, &mut rng);
                if z == 0.0 || !z.is_finite() {
                    continue;
                }
                let pg = model.psi_dalpha(x, c * z, alpha).unwrap();
                for i in 0..d3 {
                    for j in 0..d3 {
                        let v = pg[i] * pg[j];
                        sums[i * d3 + j] += v;
                        sq_sums[i * d3 + j] += v * v;
                    }
                }
            }
            let nf = reps as f64;
            for i in 0..d3 {
                for j in 0..d3 {
                    let mean = sums[i * d3 + j] / nf;
                    let var = (sq_sums[i * d3 + j] / nf - mean * mean).max(0.0);
                    let se = (var / nf).sqrt().max(1e-12);
                    let diff = (quad_m[(i, j)] - mean).abs();
                    assert!(
                        diff <= 4.0 * se,
                        "{id}: entry ({i},{j}) quadrature {} vs MC {mean} (diff {diff:e}, se {se:e})",
                        quad_m[(i, j)]
                    );
                }
            }
        }
    }

    #[test]
    fn observed_information_tracks_negative_limit_information() {
        let b = builtin("ou-gamma").unwrap();
        let mut regime = b.default_regime.clone();
        regime.n = 8000;
        regime.epsilon = 1.0 / 200.0;
        regime.lambda = 40.0;
        regime.rho = 0.24;
        regime.seed = derive_child(0x0B5E, 3, 1);
        let (obs, _) = simulate_path(&b.model, &b.theta0, &regime, 8).unwrap();
        let labels = classify_increments(&obs, &regime, b.model.density.support()).unwrap();
        let c = observed_information(&obs, &b.theta0, &labels, &b.model).unwrap();
        let info = fisher_information(&b.model, &b.theta0, 400, &QuadSpec::default()).unwrap();
        let resid = &c + &info.assembled;
        let rel = inf_norm(&resid) / inf_norm(&info.assembled);
        assert!(rel <= 0.4, "single-path observed information residual {rel}");
        // Cross blocks between (mu, sigma) and alpha vanish identically.
        for i in 0..2 {
            for j in 2..4 {
                assert_eq!(c[(i, j)], 0.0);
                assert_eq!(c[(j, i)], 0.0);
            }
        }
        // The two mu-sigma cross blocks differ exactly by the eps^2 n scale.
        let s = obs.epsilon * obs.epsilon * obs.n as f64;
        assert_relative_eq!(c[(0, 1)], s * c[(1, 0)], max_relative = 1e-12);
    }

    #[test]
    fn csv_rendering_round_trips() {
        let b = builtin("ou-gamma").unwrap();
        let info = fisher_information(&b.model, &b.theta0, 200, &QuadSpec::default()).unwrap();
        let csv = info.to_csv();
        let mut lines = csv.lines();
        let comment = lines.next().unwrap();
        assert!(comment.starts_with('#'));
        let header = lines.next().unwrap();
        assert_eq!(header, "c0,c1,c2,c3");
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 4);
        for (i, row) in rows.iter().enumerate() {
            let vals: Vec<f64> =
                row.split(',').map(|v| v.parse::<f64>().unwrap()).collect();
            assert_eq!(vals.len(), 4);
            for (j, v) in vals.iter().enumerate() {
                assert_eq!(*v, info.assembled[(i, j)], "row {i} col {j}");
            }
        }
    }

    #[test]
    fn quad_spec_validation_rejects_bad_settings() {
        let b = builtin("ou-gamma").unwrap();
        for bad in [
            QuadSpec { rel_tol: 0.0, ..QuadSpec::default() },
            QuadSpec { tail_mass: 1e-13, ..QuadSpec::default() },
            QuadSpec { tail_mass: 0.5, ..QuadSpec::default() },
            QuadSpec { max_depth: 4, ..QuadSpec::default() },
        ] {
            let err = fisher_information(&b.model, &b.theta0, 100, &bad).unwrap_err();
            assert_eq!(err.kind(), "config");
        }
    }
}

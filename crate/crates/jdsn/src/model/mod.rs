//! Model specification: coefficients, mark density, and the jump
//! log-likelihood kernel `psi`.
//!
//! For increments attributed to a jump, the contrast uses the kernel
//!
//! ```text
//! psi(x, y, alpha) = log( f_alpha(y / c(x, alpha)) / |c(x, alpha)| )
//! ```
//!
//! defined as a total function: when `c(x, alpha) = 0` or `y / c` falls
//! outside the open support of the family, `psi` is `0`. First and second
//! derivatives are only defined at interior points; [`ModelSpec::psi_dy`],
//! [`ModelSpec::psi_dalpha`], and [`ModelSpec::psi_d2`] refuse boundary or
//! off-support evaluations with [`Error::Boundary`].
//!
//! Writing `z = y / c`, `L = log f_alpha(z)`, `g_j = (d c / d alpha_j) / c`,
//! and `h_ij = (d^2 c / d alpha_i d alpha_j) / c`, the chain rule gives
//!
//! ```text
//! psi_y        = L_z / c
//! psi_alpha_j  = -g_j (1 + z L_z) + L_alpha_j
//! psi_y_alpha_j = [ L_z_alpha_j - g_j (L_z + z L_zz) ] / c
//! psi_alpha_i_alpha_j
//!   = -(h_ij - g_i g_j)(1 + z L_z) + g_i g_j z L_z
//!     - g_j z L_z_alpha_i - g_i z L_z_alpha_j + g_i g_j z^2 L_zz
//!     + L_alpha_i_alpha_j
//! ```
//!
//! with the density-side derivatives `L_alpha_j`, `L_z_alpha_j`,
//! `L_alpha_i_alpha_j` vanishing for parameter indices beyond the family's
//! own parameter count. All of these are pinned in tests against 50-digit
//! numerical differentiation.

pub mod builtin;
pub mod coeff;
pub mod density;
pub mod params;
pub mod regime;

pub use builtin::{builtin, BuiltinModel};
pub use coeff::{DiffusionSpec, DriftSpec, JumpCoeffSpec};
pub use density::{DensityKind, JumpDensityFamily, LogPdfDerivs, SupportKind};
pub use params::{ParameterDomain, ParameterPoint};
pub use regime::{
    validate_regime_ladder, validate_regime_ladder_with_density, validate_rho, ConditionTrend,
    LadderDiagnostics, RegimeConfig, RhoVerdict, TailContext, TrendStatus,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Full model specification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub drift: DriftSpec,
    pub diffusion: DiffusionSpec,
    pub jump: JumpCoeffSpec,
    pub density: JumpDensityFamily,
    /// Deterministic initial state.
    pub x0: f64,
}

/// Second derivatives of `psi` at an interior point.
#[derive(Clone, Debug)]
pub struct PsiSecondDerivs {
    /// `d^2 psi / dy dalpha_j`, length `d3`.
    pub dy_dalpha: Vec<f64>,
    /// `d^2 psi / dalpha_i dalpha_j`, row-major `d3 x d3`, symmetric.
    pub dalpha2: Vec<f64>,
}

impl ModelSpec {
    /// Block dimensions `(d1, d2, d3)`.
    pub fn dims(&self) -> (usize, usize, usize) {
        (
            self.drift.dim(),
            self.diffusion.dim(),
            self.density.alpha_dim().max(self.jump.min_alpha_len()),
        )
    }

    pub fn d1(&self) -> usize {
        self.dims().0
    }

    pub fn d2(&self) -> usize {
        self.dims().1
    }

    pub fn d3(&self) -> usize {
        self.dims().2
    }

    pub fn a(&self, x: f64, mu: &[f64]) -> f64 {
        self.drift.value(x, mu)
    }

    pub fn b(&self, x: f64, sigma: &[f64]) -> f64 {
        self.diffusion.value(x, sigma)
    }

    pub fn c(&self, x: f64, alpha: &[f64]) -> f64 {
        self.jump.value(x, alpha)
    }

    /// Validates a parameter point against the model's dimensions and the
    /// family's admissible set.
    pub fn validate_theta(&self, theta: &ParameterPoint) -> Result<()> {
        if theta.dims() != self.dims() {
            return Err(Error::Model(format!(
                "parameter dimensions {:?} do not match the model's {:?}",
                theta.dims(),
                self.dims()
            )));
        }
        if !theta.all_finite() {
            return Err(Error::Model("parameters must be finite".into()));
        }
        self.density.admissible(&theta.alpha)
    }

    /// Validates a box domain: dimensions must match and every point of the
    /// box must be admissible for the mark family (checked on the corners;
    /// the admissible set is coordinate-monotone for the built-in families).
    pub fn validate_domain(&self, domain: &ParameterDomain) -> Result<()> {
        domain.validate()?;
        if domain.dims() != self.dims() {
            return Err(Error::Model(format!(
                "domain dimensions {:?} do not match the model's {:?}",
                domain.dims(),
                self.dims()
            )));
        }
        self.density.admissible(&domain.lower.alpha)?;
        self.density.admissible(&domain.upper.alpha)?;
        Ok(())
    }

    /// The jump log-likelihood kernel as a total function (see module docs).
    pub fn psi(&self, x: f64, y: f64, alpha: &[f64]) -> f64 {
        let c = self.c(x, alpha);
        if c == 0.0 || !c.is_finite() {
            return 0.0;
        }
        let z = y / c;
        match self.density.log_pdf(alpha, z) {
            Some(l) => l - c.abs().ln(),
            None => 0.0,
        }
    }

    fn interior_parts(&self, x: f64, y: f64, alpha: &[f64]) -> Result<(f64, f64, LogPdfDerivs)> {
        let c = self.c(x, alpha);
        if c == 0.0 || !c.is_finite() {
            return Err(Error::Boundary(format!(
                "psi derivatives undefined where the jump coefficient is {c} (x = {x})"
            )));
        }
        let z = y / c;
        let d = self.density.log_pdf_derivs(alpha, z).ok_or_else(|| {
            Error::Boundary(format!(
                "psi derivatives undefined at the support boundary (z = {z}, family '{}')",
                self.density.id()
            ))
        })?;
        Ok((c, z, d))
    }

    /// `d psi / dy` at an interior point.
    pub fn psi_dy(&self, x: f64, y: f64, alpha: &[f64]) -> Result<f64> {
        let (c, _z, d) = self.interior_parts(x, y, alpha)?;
        Ok(d.lz / c)
    }

    /// Gradient of `psi` in the jump parameters at an interior point.
    pub fn psi_dalpha(&self, x: f64, y: f64, alpha: &[f64]) -> Result<Vec<f64>> {
        let (c, z, d) = self.interior_parts(x, y, alpha)?;
        let d3 = self.d3();
        let mut cg = vec![0.0; d3];
        self.jump.grad_into(x, alpha, &mut cg);
        let mut out = vec![0.0; d3];
        let zl = 1.0 + z * d.lz;
        for j in 0..d3 {
            let gj = cg[j] / c;
            let la = if j < 2 { d.la[j] } else { 0.0 };
            out[j] = -gj * zl + la;
        }
        Ok(out)
    }

    /// Second derivatives of `psi` at an interior point.
    pub fn psi_d2(&self, x: f64, y: f64, alpha: &[f64]) -> Result<PsiSecondDerivs> {
        let (c, z, d) = self.interior_parts(x, y, alpha)?;
        let d3 = self.d3();
        let mut cg = vec![0.0; d3];
        self.jump.grad_into(x, alpha, &mut cg);
        let mut ch = vec![0.0; d3 * d3];
        self.jump.hess_into(x, alpha, d3, &mut ch);

        let g: Vec<f64> = cg.iter().map(|v| v / c).collect();
        let lza = |j: usize| if j < 2 { d.lza[j] } else { 0.0 };
        let laa = |i: usize, j: usize| if i < 2 && j < 2 { d.laa[i][j] } else { 0.0 };

        let zl = 1.0 + z * d.lz;
        let mut dy_dalpha = vec![0.0; d3];
        for j in 0..d3 {
            dy_dalpha[j] = (lza(j) - g[j] * (d.lz + z * d.lzz)) / c;
        }

        let mut dalpha2 = vec![0.0; d3 * d3];
        for i in 0..d3 {
            for j in 0..d3 {
                let hij = ch[i * d3 + j] / c;
                dalpha2[i * d3 + j] = -(hij - g[i] * g[j]) * zl + g[i] * g[j] * z * d.lz
                    - g[j] * z * lza(i)
                    - g[i] * z * lza(j)
                    + g[i] * g[j] * z * z * d.lzz
                    + laa(i, j);
            }
        }
        Ok(PsiSecondDerivs { dy_dalpha, dalpha2 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn model_with(jump: JumpCoeffSpec, kind: DensityKind) -> ModelSpec {
        ModelSpec {
            drift: DriftSpec::Linear,
            diffusion: DiffusionSpec::Constant,
            jump,
            density: JumpDensityFamily::new(kind),
            x0: 1.0,
        }
    }

    #[test]
    fn psi_pinned_examples() {
        let unit_gamma = model_with(JumpCoeffSpec::Const { value: 1.0 }, DensityKind::Gamma);
        // Off-support mark: the total function takes the zero branch.
        assert_eq!(unit_gamma.psi(0.5, -1.0, &[1.0, 2.0]), 0.0);

        let unit_normal = model_with(JumpCoeffSpec::Const { value: 1.0 }, DensityKind::Normal);
        assert_relative_eq!(
            unit_normal.psi(0.5, 0.0, &[0.0, 1.0]),
            -0.918_938_533_204_672_8,
            max_relative = 1e-14
        );

        let double_normal = model_with(JumpCoeffSpec::Const { value: 2.0 }, DensityKind::Normal);
        assert_relative_eq!(
            double_normal.psi(0.5, 2.0, &[0.0, 1.0]),
            -2.112_085_713_764_618,
            max_relative = 1e-14
        );

        let zero_c = model_with(JumpCoeffSpec::Const { value: 0.0 }, DensityKind::Normal);
        assert_eq!(zero_c.psi(0.5, 2.0, &[0.0, 1.0]), 0.0);
        assert!(zero_c.psi_dy(0.5, 2.0, &[0.0, 1.0]).is_err());
    }

    #[test]
    fn psi_dy_pinned_examples() {
        let unit_gamma = model_with(JumpCoeffSpec::Const { value: 1.0 }, DensityKind::Gamma);
        // (a2 - 1)/y - 1/a1 at y = 1, alpha = (1, 2): 1 - 1 = 0.
        assert_relative_eq!(unit_gamma.psi_dy(0.5, 1.0, &[1.0, 2.0]).unwrap(), 0.0);
        // Boundary evaluation refuses.
        assert!(unit_gamma.psi_dy(0.5, 0.0, &[1.0, 2.0]).is_err());
        assert!(unit_gamma.psi_dalpha(0.5, -0.2, &[1.0, 2.0]).is_err());
        assert!(unit_gamma.psi_d2(0.5, 0.0, &[1.0, 2.0]).is_err());

        let unit_normal = model_with(JumpCoeffSpec::Const { value: 1.0 }, DensityKind::Normal);
        for y in [-2.0, 0.0, 3.0] {
            assert_relative_eq!(
                unit_normal.psi_dy(0.5, y, &[0.0, 1.0]).unwrap(),
                -y,
                epsilon = 1e-14
            );
        }
    }

    /// Reference values computed with 50-digit numerical differentiation of
    /// `psi(alpha, y) = log f(y / c) - log|c|` for `c = alpha_3` (gamma
    /// family, alpha = (1.3, 2.4, 0.8), y = 0.72).
    #[test]
    fn chain_rule_with_parameterized_coefficient_matches_reference() {
        let m = model_with(JumpCoeffSpec::Param { index: 2 }, DensityKind::Gamma);
        assert_eq!(m.d3(), 3);
        let alpha = [1.3, 2.4, 0.8];
        let y = 0.72;
        let x = 0.5;
        assert_relative_eq!(m.psi(x, y, &alpha), -1.463_202_420_085_259_6, max_relative = 1e-12);
        assert_relative_eq!(
            m.psi_dy(x, y, &alpha).unwrap(),
            0.982_905_982_905_982_9,
            max_relative = 1e-12
        );
        let g = m.psi_dalpha(x, y, &alpha).unwrap();
        assert_relative_eq!(g[0], -1.313_609_467_455_621_3, max_relative = 1e-12);
        assert_relative_eq!(g[1], -1.020_625_949_825_915_6, max_relative = 1e-12);
        assert_relative_eq!(g[2], -2.134_615_384_615_384_6, max_relative = 1e-12);
        let s = m.psi_d2(x, y, &alpha).unwrap();
        assert_relative_eq!(s.dy_dalpha[0], 0.739_644_970_414_201_2, max_relative = 1e-12);
        assert_relative_eq!(s.dy_dalpha[1], 1.388_888_888_888_888_8, max_relative = 1e-12);
        assert_relative_eq!(s.dy_dalpha[2], 1.201_923_076_923_076_9, max_relative = 1e-12);
        let expect = [
            [0.600_819_299_044_151_1, -0.769_230_769_230_769_3, -0.665_680_473_372_781],
            [-0.769_230_769_230_769_3, -0.515_152_508_896_944_4, -1.25],
            [-0.665_680_473_372_781, -1.25, 1.586_538_461_538_461_5],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(s.dalpha2[i * 3 + j], expect[i][j], max_relative = 1e-12);
            }
        }
    }

    /// Same check for `c = exp(alpha_3)` (normal family,
    /// alpha = (0.3, 1.7, -0.2), y = 1.1), which has a non-zero coefficient
    /// Hessian.
    #[test]
    fn chain_rule_with_exponential_coefficient_matches_reference() {
        let m = model_with(JumpCoeffSpec::ExpParam { index: 2 }, DensityKind::Normal);
        let alpha = [0.3, 1.7, -0.2];
        let y = 1.1;
        let x = 0.5;
        assert_relative_eq!(m.psi(x, y, &alpha), -1.437_971_985_609_442_6, max_relative = 1e-12);
        assert_relative_eq!(
            m.psi_dy(x, y, &alpha).unwrap(),
            -0.441_033_335_625_379_4,
            max_relative = 1e-12
        );
        let g = m.psi_dalpha(x, y, &alpha).unwrap();
        assert_relative_eq!(g[2], -0.514_863_330_812_082_7, max_relative = 1e-12);
        let s = m.psi_d2(x, y, &alpha).unwrap();
        assert_relative_eq!(s.dy_dalpha[2], 1.008_855_884_900_603_3, max_relative = 1e-12);
        assert_relative_eq!(s.dalpha2[8], -1.109_741_473_390_663_6, max_relative = 1e-12);
        assert_relative_eq!(s.dalpha2[2], -0.464_893_783_382_763_6, max_relative = 1e-12);
        assert_relative_eq!(s.dalpha2[5], -0.570_749_022_574_020_4, max_relative = 1e-12);
        assert_relative_eq!(s.dalpha2[2], s.dalpha2[6], max_relative = 1e-14);
        assert_relative_eq!(s.dalpha2[5], s.dalpha2[7], max_relative = 1e-14);
    }

    #[test]
    fn pure_coefficient_parameters_extend_the_jump_block() {
        // With a constant coefficient the jump block is exactly the family's
        // parameters and coefficient-parameter slots do not exist.
        let m = model_with(JumpCoeffSpec::Const { value: 1.0 }, DensityKind::Gamma);
        assert_eq!(m.d3(), 2);
        // With c = alpha_4 and a 2-parameter family, slots 3 and 4 exist and
        // the gradient of psi in slot 3 (unused by both density and
        // coefficient) is zero.
        let m = model_with(JumpCoeffSpec::Param { index: 3 }, DensityKind::Gamma);
        assert_eq!(m.d3(), 4);
        let g = m.psi_dalpha(0.5, 0.72, &[1.3, 2.4, 0.0, 0.8]).unwrap();
        assert_eq!(g[2], 0.0);
        assert_relative_eq!(g[3], -2.134_615_384_615_384_6, max_relative = 1e-12);
    }

    #[test]
    fn theta_and_domain_validation() {
        let m = model_with(JumpCoeffSpec::Const { value: 1.0 }, DensityKind::Gamma);
        let ok = ParameterPoint::new(vec![1.0], vec![1.0], vec![1.0, 2.0]);
        assert!(m.validate_theta(&ok).is_ok());
        let bad_dim = ParameterPoint::new(vec![1.0, 2.0], vec![1.0], vec![1.0, 2.0]);
        assert!(m.validate_theta(&bad_dim).is_err());
        let bad_alpha = ParameterPoint::new(vec![1.0], vec![1.0], vec![1.0, 0.5]);
        assert!(m.validate_theta(&bad_alpha).is_err());
        let dom = ParameterDomain::new(
            ParameterPoint::new(vec![0.2], vec![0.2], vec![0.2, 1.05]),
            ParameterPoint::new(vec![3.0], vec![3.0], vec![5.0, 8.0]),
        )
        .unwrap();
        assert!(m.validate_domain(&dom).is_ok());
        let bad_dom = ParameterDomain::new(
            ParameterPoint::new(vec![0.2], vec![0.2], vec![0.2, 0.5]),
            ParameterPoint::new(vec![3.0], vec![3.0], vec![5.0, 8.0]),
        )
        .unwrap();
        assert!(m.validate_domain(&bad_dom).is_err());
    }
}

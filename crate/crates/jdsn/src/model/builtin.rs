//! Built-in reference models: an Ornstein–Uhlenbeck-type diffusion with
//! constant jump coefficient, one per mark family.
//!
//! Each built-in bundles a [`ModelSpec`], a true parameter point, a box
//! domain for the optimizer, and a default regime, so that examples and
//! studies can start from a single identifier.

use crate::error::{Error, Result};
use crate::model::{
    DensityKind, DiffusionSpec, DriftSpec, JumpCoeffSpec, JumpDensityFamily, ModelSpec,
    ParameterDomain, ParameterPoint, RegimeConfig,
};

/// A ready-to-run model with true parameters, domain, and default regime.
#[derive(Clone, Debug)]
pub struct BuiltinModel {
    pub id: &'static str,
    pub model: ModelSpec,
    pub theta0: ParameterPoint,
    pub domain: ParameterDomain,
    pub default_regime: RegimeConfig,
}

fn ou_model(kind: DensityKind) -> ModelSpec {
    ModelSpec {
        drift: DriftSpec::Linear,
        diffusion: DiffusionSpec::Constant,
        jump: JumpCoeffSpec::Const { value: 1.0 },
        density: JumpDensityFamily::new(kind),
        x0: 1.0,
    }
}

fn regime(rho: f64) -> RegimeConfig {
    RegimeConfig {
        n: 1000,
        epsilon: 0.01,
        lambda: 10.0,
        rho,
        v: 1.0,
        seed: 1,
    }
}

/// Looks up a built-in model by identifier.
///
/// Known identifiers: `ou-gamma`, `ou-normal`, `ou-ig`, `ou-weibull`,
/// `ou-lognormal`.
pub fn builtin(id: &str) -> Result<BuiltinModel> {
    let (id, kind, alpha0, alpha_lo, alpha_hi, rho) = match id {
        "ou-gamma" => {
            ("ou-gamma", DensityKind::Gamma, vec![1.0, 2.0], vec![0.2, 1.05], vec![5.0, 8.0], 0.20)
        }
        "ou-normal" => {
            ("ou-normal", DensityKind::Normal, vec![0.0, 1.0], vec![-3.0, 0.2], vec![3.0, 5.0], 0.30)
        }
        "ou-ig" => (
            "ou-ig",
            DensityKind::InverseGaussian,
            vec![1.0, 2.0],
            vec![0.2, 0.2],
            vec![5.0, 8.0],
            0.10,
        ),
        "ou-weibull" => (
            "ou-weibull",
            DensityKind::Weibull,
            vec![1.0, 2.0],
            vec![0.2, 1.05],
            vec![5.0, 8.0],
            0.20,
        ),
        "ou-lognormal" => (
            "ou-lognormal",
            DensityKind::LogNormal,
            vec![0.0, 0.5],
            vec![-3.0, 0.2],
            vec![3.0, 5.0],
            0.20,
        ),
        other => {
            return Err(Error::Config(format!(
                "unknown model '{other}' (expected one of: ou-gamma, ou-normal, ou-ig, \
                 ou-weibull, ou-lognormal)"
            )))
        }
    };
    let model = ou_model(kind);
    let theta0 = ParameterPoint::new(vec![1.0], vec![1.0], alpha0);
    let domain = ParameterDomain::new(
        ParameterPoint::new(vec![0.2], vec![0.2], alpha_lo),
        ParameterPoint::new(vec![3.0], vec![3.0], alpha_hi),
    )?;
    model.validate_theta(&theta0)?;
    model.validate_domain(&domain)?;
    let default_regime = regime(rho);
    default_regime.validate()?;
    Ok(BuiltinModel { id, model, theta0, domain, default_regime })
}

/// All built-in identifiers, for help text and enumeration.
pub const BUILTIN_IDS: [&str; 5] = ["ou-gamma", "ou-normal", "ou-ig", "ou-weibull", "ou-lognormal"];

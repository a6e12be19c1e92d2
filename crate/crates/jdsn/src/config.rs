//! Study configuration: one JSON document describing a complete run.
//!
//! A [`StudyConfig`] names a built-in model and optionally overrides its
//! pieces (truth, initial state, jump coefficient, optimizer domain, regime
//! or regime ladder) and sets the study budget. [`StudyConfig::resolve`]
//! turns it into concrete runnable objects, applying the built-in's defaults
//! for everything left unspecified. Values round-trip losslessly through
//! serialization, and [`StudyConfig::canonical_json`] provides the stable
//! rendering whose SHA-256 is recorded in run manifests.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::estimate::{LambdaMode, OptimizerOptions};
use crate::mcstudy::StudyDesign;
use crate::model::{
    builtin, JumpCoeffSpec, ModelSpec, ParameterDomain, ParameterPoint, RegimeConfig,
};

fn default_substeps() -> usize {
    16
}
fn default_starts() -> usize {
    8
}
fn default_tol() -> f64 {
    1e-9
}
fn default_max_iters() -> usize {
    2000
}
fn default_polish() -> bool {
    true
}
fn default_polish_iters() -> usize {
    200
}
fn default_reps() -> usize {
    100
}
fn default_fisher_time_steps() -> usize {
    2000
}

/// One study, as read from a JSON config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    /// Built-in model identifier (`ou-gamma`, `ou-normal`, `ou-ig`,
    /// `ou-weibull`, `ou-lognormal`).
    pub model: String,
    /// True parameter point; the built-in's when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<ParameterPoint>,
    /// Initial state; the built-in's when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    /// Jump coefficient override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jump_coeff: Option<JumpCoeffSpec>,
    /// Optimizer box; the built-in's when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<ParameterDomain>,
    /// Observation regime; the built-in's when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<RegimeConfig>,
    /// Regime ladder for consistency studies (used by the mc command in
    /// place of `regime` when present).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<RegimeConfig>>,
    /// Replications per regime.
    #[serde(default = "default_reps")]
    pub reps: usize,
    /// Euler substeps per observation interval.
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    /// Optimizer multistart count.
    #[serde(default = "default_starts")]
    pub starts: usize,
    /// Optimizer convergence tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Optimizer iteration cap per start.
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// Whether to run the gradient polish after the simplex search.
    #[serde(default = "default_polish")]
    pub polish: bool,
    /// Gradient-polish iteration cap.
    #[serde(default = "default_polish_iters")]
    pub polish_iters: usize,
    /// Fix the jump-contrast scale to this known intensity instead of the
    /// estimated jump count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_lambda: Option<f64>,
    /// Simpson intervals for the limit information's time integrals.
    #[serde(default = "default_fisher_time_steps")]
    pub fisher_time_steps: usize,
    /// Whether the mc command also writes normality diagnostics.
    #[serde(default)]
    pub normality: bool,
    /// Master seed; every replication and rung seed derives from it.
    pub master_seed: u64,
    /// Output directory (the command line's `--out` takes precedence).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<String>,
}

/// A config resolved against the built-in defaults: concrete model, truth,
/// regime(s), and study design.
#[derive(Clone, Debug)]
pub struct ResolvedStudy {
    pub design: StudyDesign,
    pub regime: RegimeConfig,
    pub ladder: Option<Vec<RegimeConfig>>,
    pub fisher_time_steps: usize,
    pub normality: bool,
    pub out_dir: Option<String>,
}

impl StudyConfig {
    /// Minimal config for a built-in model: everything else defaulted.
    pub fn for_model(model: &str, master_seed: u64) -> Self {
        StudyConfig {
            model: model.to_string(),
            theta0: None,
            x0: None,
            jump_coeff: None,
            domain: None,
            regime: None,
            ladder: None,
            reps: default_reps(),
            substeps: default_substeps(),
            starts: default_starts(),
            tol: default_tol(),
            max_iters: default_max_iters(),
            polish: default_polish(),
            polish_iters: default_polish_iters(),
            known_lambda: None,
            fisher_time_steps: default_fisher_time_steps(),
            normality: false,
            master_seed,
            out_dir: None,
        }
    }

    /// Resolves the config into runnable objects, validating every piece.
    pub fn resolve(&self) -> Result<ResolvedStudy> {
        let base = builtin(&self.model)?;
        let mut model: ModelSpec = base.model.clone();
        if let Some(x0) = self.x0 {
            if !x0.is_finite() {
                return Err(Error::Config(format!("x0 must be finite, got {x0}")));
            }
            model.x0 = x0;
        }
        if let Some(jc) = &self.jump_coeff {
            model.jump = jc.clone();
        }
        let theta0 = self.theta0.clone().unwrap_or_else(|| base.theta0.clone());
        model.validate_theta(&theta0)?;
        let domain = self.domain.clone().unwrap_or_else(|| base.domain.clone());
        model.validate_domain(&domain)?;

        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        if self.substeps == 0 {
            return Err(Error::Config("substeps must be at least 1".into()));
        }
        if self.starts == 0 {
            return Err(Error::Config("starts must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.fisher_time_steps < 2 {
            return Err(Error::Config("fisher_time_steps must be at least 2".into()));
        }
        let lambda_mode = match self.known_lambda {
            Some(l) if l > 0.0 && l.is_finite() => LambdaMode::Known(l),
            Some(l) => {
                return Err(Error::Config(format!(
                    "known_lambda must be a positive finite intensity, got {l}"
                )))
            }
            None => LambdaMode::Estimated,
        };

        let mut optimizer = OptimizerOptions::new(domain);
        optimizer.starts = self.starts;
        optimizer.tol = self.tol;
        optimizer.max_iters = self.max_iters;
        optimizer.polish = self.polish;
        optimizer.polish_iters = self.polish_iters;
        optimizer.lambda_mode = lambda_mode;

        let regime = self.regime.clone().unwrap_or_else(|| base.default_regime.clone());
        regime.validate()?;
        let ladder = match &self.ladder {
            Some(l) if l.is_empty() => {
                return Err(Error::Config("ladder must not be empty when present".into()))
            }
            Some(l) => {
                for r in l {
                    r.validate()?;
                }
                Some(l.clone())
            }
            None => None,
        };

        Ok(ResolvedStudy {
            design: StudyDesign {
                model,
                model_id: self.model.clone(),
                theta0,
                optimizer,
                reps: self.reps,
                master_seed: self.master_seed,
                substeps: self.substeps,
            },
            regime,
            ladder,
            fisher_time_steps: self.fisher_time_steps,
            normality: self.normality,
            out_dir: self.out_dir.clone(),
        })
    }

    /// Stable JSON rendering (declaration field order, two-space indent)
    /// whose hash identifies the study in manifests.
    pub fn canonical_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(Error::from)
    }
}

/// Hex SHA-256 of a string.
pub fn sha256_hex(data: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DensityKind, DriftSpec};

    #[test]
    fn minimal_config_resolves_with_builtin_defaults() {
        let cfg: StudyConfig =
            serde_json::from_str(r#"{"model": "ou-gamma", "master_seed": 7}"#).unwrap();
        assert_eq!(cfg.reps, 100);
        assert_eq!(cfg.substeps, 16);
        assert_eq!(cfg.starts, 8);
        assert_eq!(cfg.fisher_time_steps, 2000);
        assert!(!cfg.normality);
        let rs = cfg.resolve().unwrap();
        assert_eq!(rs.design.model_id, "ou-gamma");
        assert_eq!(rs.design.theta0.mu, vec![1.0]);
        assert_eq!(rs.design.theta0.alpha, vec![1.0, 2.0]);
        assert_eq!(rs.regime.n, 1000);
        assert!(rs.ladder.is_none());
        assert!(matches!(rs.design.model.drift, DriftSpec::Linear));
        assert_eq!(rs.design.model.density.kind, DensityKind::Gamma);
    }

    #[test]
    fn value_round_trip_is_lossless() {
        let mut cfg = StudyConfig::for_model("ou-normal", 99);
        cfg.theta0 = Some(ParameterPoint::new(vec![1.2], vec![0.8], vec![0.1, 1.1]));
        cfg.x0 = Some(2.0);
        cfg.regime = Some(RegimeConfig {
            n: 500,
            epsilon: 0.02,
            lambda: 10.0,
            rho: 0.3,
            v: 1.0,
            seed: 3,
        });
        cfg.ladder = Some(vec![cfg.regime.clone().unwrap()]);
        cfg.known_lambda = Some(10.0);
        cfg.normality = true;
        cfg.out_dir = Some("/tmp/out".into());
        let json = cfg.canonical_json().unwrap();
        let back: StudyConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        // Canonical rendering is stable across the round trip.
        assert_eq!(back.canonical_json().unwrap(), json);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = serde_json::from_str::<StudyConfig>(
            r#"{"model": "ou-gamma", "master_seed": 1, "surprise": true}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("surprise"));
    }

    #[test]
    fn bad_inputs_fail_resolution_with_config_errors() {
        let mut cfg = StudyConfig::for_model("nope", 1);
        assert_eq!(cfg.resolve().unwrap_err().kind(), "config");

        cfg = StudyConfig::for_model("ou-gamma", 1);
        cfg.known_lambda = Some(-2.0);
        assert_eq!(cfg.resolve().unwrap_err().kind(), "config");

        cfg = StudyConfig::for_model("ou-gamma", 1);
        cfg.ladder = Some(vec![]);
        assert_eq!(cfg.resolve().unwrap_err().kind(), "config");

        cfg = StudyConfig::for_model("ou-gamma", 1);
        cfg.reps = 0;
        assert_eq!(cfg.resolve().unwrap_err().kind(), "config");

        cfg = StudyConfig::for_model("ou-gamma", 1);
        cfg.theta0 = Some(ParameterPoint::new(vec![1.0], vec![1.0], vec![1.0, 0.5]));
        // alpha_2 <= 1 is inadmissible for the gamma family.
        assert_eq!(cfg.resolve().unwrap_err().kind(), "model");
    }

    #[test]
    fn overrides_land_in_the_resolved_model() {
        let mut cfg = StudyConfig::for_model("ou-gamma", 5);
        cfg.x0 = Some(0.5);
        cfg.jump_coeff = Some(JumpCoeffSpec::Const { value: 2.0 });
        cfg.known_lambda = Some(12.0);
        let rs = cfg.resolve().unwrap();
        assert_eq!(rs.design.model.x0, 0.5);
        assert!(matches!(rs.design.model.jump, JumpCoeffSpec::Const { value } if value == 2.0));
        assert!(matches!(rs.design.optimizer.lambda_mode, LambdaMode::Known(l) if l == 12.0));
    }

    #[test]
    fn hashes_separate_distinct_configs() {
        let a = StudyConfig::for_model("ou-gamma", 5);
        let mut b = a.clone();
        b.master_seed = 6;
        let ha = sha256_hex(&a.canonical_json().unwrap());
        let hb = sha256_hex(&b.canonical_json().unwrap());
        assert_eq!(ha.len(), 64);
        assert_ne!(ha, hb);
        assert_eq!(ha, sha256_hex(&a.canonical_json().unwrap()));
    }
}

//! Threshold classification of increments into continuous and jump parts.
//!
//! The `k`-th increment is attributed to a jump when its noise-normalized
//! value `u_k = (X_{t_k} - X_{t_{k-1}}) / eps` crosses the threshold
//! `v / n^rho`: `|u_k|` for whole-line mark families, `u_k` itself for
//! positive-half-line families (whose jump displacements have a known sign).
//! Values exactly at the threshold stay continuous. The number of jump-labeled
//! increments is the intensity estimator.

use crate::error::{Error, Result};
use crate::model::{RegimeConfig, SupportKind};
use crate::simulate::ObservationRecord;

/// Per-increment classification plus bookkeeping.
#[derive(Clone, Debug)]
pub struct FilterLabels {
    /// `jump[k]` is true when increment `k` is attributed to a jump.
    pub jump: Vec<bool>,
    /// The threshold `v / n^rho` applied to noise-normalized increments.
    pub threshold: f64,
    pub support: SupportKind,
    pub n_continuous: usize,
    pub n_jump: usize,
}

impl FilterLabels {
    /// Iterator over jump-labeled increment indices.
    pub fn jump_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.jump.iter().enumerate().filter(|(_, &j)| j).map(|(k, _)| k)
    }
}

/// Classifies every increment of `obs` under `regime`'s threshold.
pub fn classify_increments(
    obs: &ObservationRecord,
    regime: &RegimeConfig,
    support: SupportKind,
) -> Result<FilterLabels> {
    regime.validate()?;
    if obs.n != regime.n {
        return Err(Error::Config(format!(
            "observation count n = {} does not match the regime's n = {}",
            obs.n, regime.n
        )));
    }
    if !(obs.epsilon > 0.0) {
        return Err(Error::Config(
            "estimation requires epsilon > 0 (the filter normalizes increments by epsilon)"
                .into(),
        ));
    }
    if (obs.epsilon - regime.epsilon).abs() > 1e-12 * obs.epsilon.max(regime.epsilon) {
        return Err(Error::Config(format!(
            "observation epsilon = {} does not match the regime's epsilon = {}",
            obs.epsilon, regime.epsilon
        )));
    }
    let threshold = regime.threshold();
    let mut jump = Vec::with_capacity(obs.n);
    let mut n_jump = 0usize;
    for k in 0..obs.n {
        let u = obs.increment(k) / obs.epsilon;
        let is_jump = match support {
            SupportKind::WholeLine => u.abs() > threshold,
            SupportKind::PositiveHalfLine => u > threshold,
        };
        if is_jump {
            n_jump += 1;
        }
        jump.push(is_jump);
    }
    Ok(FilterLabels {
        jump,
        threshold,
        support,
        n_continuous: obs.n - n_jump,
        n_jump,
    })
}

/// The intensity estimator: the number of jump-labeled increments.
pub fn estimate_intensity(labels: &FilterLabels) -> f64 {
    labels.n_jump as f64
}

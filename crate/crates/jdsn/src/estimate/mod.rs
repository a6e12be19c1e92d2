//! Threshold-filtered quasi-likelihood estimation.
//!
//! The pipeline is: classify increments with the threshold filter
//! ([`classify_increments`]), evaluate or maximize the contrast
//! ([`contrast_full`], [`maximize_contrast`]), and read off the intensity
//! estimate as the number of jump-labeled increments. Score components and
//! second-derivative blocks feed the information-matrix diagnostics.

pub mod contrast;
pub mod filter;
pub mod optimize;

pub use contrast::{
    contrast_continuous, contrast_full, contrast_jump, grad_continuous, grad_jump,
    hessian_blocks, score_components, HessianBlocks, ScoreComponents,
};
pub use filter::{classify_increments, estimate_intensity, FilterLabels};
pub use optimize::{
    maximize_contrast, maximize_contrast_joint, maximize_with_labels, EstimationResult,
    LambdaMode, OptimizerOptions,
};

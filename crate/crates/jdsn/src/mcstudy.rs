//! Monte Carlo studies: replicated simulate–estimate runs, consistency
//! ladders across regimes, and asymptotic-normality diagnostics.
//!
//! Every replication receives a seed derived deterministically from the
//! study's master seed and the replication index, so tables are bit-for-bit
//! reproducible regardless of the number of worker threads. The standardized
//! estimation error stored per row is
//!
//! ```text
//! ( (mu_hat - mu0) / eps,  sqrt(n) (sigma_hat - sigma0),  sqrt(lambda) (alpha_hat - alpha0) )
//! ```
//!
//! whose limit law is centered normal with covariance equal to the inverse of
//! the assembled limit information.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{maximize_contrast, OptimizerOptions};
use crate::fisher::FisherInformation;
use crate::model::{
    validate_regime_ladder, validate_regime_ladder_with_density, validate_rho, ModelSpec,
    ParameterPoint, RegimeConfig, TailContext,
};
use crate::numeric::ks::ks_test;
use crate::numeric::linalg::{frobenius, sym_inverse, sym_sqrt};
use crate::numeric::rng::derive_child;
use crate::numeric::special::normal_cdf;
use crate::simulate::{simulate_path, solve_limit_path};

/// Stream tags for seed derivation: one per replication, one per ladder rung.
const REP_STREAM: u64 = 0x5eed;
const RUNG_STREAM: u64 = 0x4ADD;

/// Everything a study needs besides the regime(s): the model, the truth, the
/// optimizer settings, and the budget.
#[derive(Clone, Debug)]
pub struct StudyDesign {
    pub model: ModelSpec,
    /// Identifier recorded in table metadata (a built-in id or a free label).
    pub model_id: String,
    pub theta0: ParameterPoint,
    pub optimizer: OptimizerOptions,
    /// Replications per regime.
    pub reps: usize,
    pub master_seed: u64,
    /// Euler substeps per observation interval.
    pub substeps: usize,
}

/// One replication's outcome.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct McRow {
    pub rep: usize,
    pub seed: u64,
    pub theta_hat: Option<ParameterPoint>,
    /// Jump-count intensity estimate; NaN when the replication failed.
    pub lambda_hat: f64,
    pub converged: bool,
    /// Error message when simulation or estimation failed.
    pub error: Option<String>,
    /// Standardized estimation error (see module docs), present whenever an
    /// estimate exists.
    pub std_error: Option<Vec<f64>>,
}

/// Identifying metadata for one replication table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct McMetadata {
    pub model_id: String,
    pub regime: RegimeConfig,
    pub theta0: ParameterPoint,
    pub reps: usize,
    pub master_seed: u64,
    pub substeps: usize,
}

/// A table of replications under one regime.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct McTable {
    pub rows: Vec<McRow>,
    pub metadata: McMetadata,
}

fn fmt_cell(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "nan".to_string()
    }
}

impl McTable {
    /// Converged rows that carry both an estimate and a standardized error.
    pub fn converged_rows(&self) -> impl Iterator<Item = &McRow> {
        self.rows.iter().filter(|r| r.converged && r.theta_hat.is_some())
    }

    /// Renders the table as CSV: identification columns, the estimate in
    /// block order, the standardized error, and a sanitized error message.
    pub fn to_csv(&self) -> String {
        let (d1, d2, d3) = self.metadata.theta0.dims();
        let d = d1 + d2 + d3;
        let mut header = vec![
            "rep".to_string(),
            "seed".to_string(),
            "converged".to_string(),
            "lambda_hat".to_string(),
        ];
        for i in 0..d1 {
            header.push(format!("mu_{}", i + 1));
        }
        for i in 0..d2 {
            header.push(format!("sigma_{}", i + 1));
        }
        for i in 0..d3 {
            header.push(format!("alpha_{}", i + 1));
        }
        for i in 0..d {
            header.push(format!("stderr_{}", i + 1));
        }
        header.push("error".to_string());
        let mut out = header.join(",");
        out.push('\n');
        for row in &self.rows {
            let mut cells = vec![
                row.rep.to_string(),
                row.seed.to_string(),
                if row.converged { "1".to_string() } else { "0".to_string() },
                fmt_cell(row.lambda_hat),
            ];
            match &row.theta_hat {
                Some(t) => cells.extend(t.flatten().iter().map(|&v| fmt_cell(v))),
                None => cells.extend(std::iter::repeat("nan".to_string()).take(d)),
            }
            match &row.std_error {
                Some(e) => cells.extend(e.iter().map(|&v| fmt_cell(v))),
                None => cells.extend(std::iter::repeat("nan".to_string()).take(d)),
            }
            cells.push(match &row.error {
                Some(msg) => msg.replace([',', '\n'], ";"),
                None => String::new(),
            });
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// The standardized estimation error with the three block rates.
pub fn standardized_error(
    theta_hat: &ParameterPoint,
    theta0: &ParameterPoint,
    regime: &RegimeConfig,
) -> Vec<f64> {
    let sqrt_n = (regime.n as f64).sqrt();
    let sqrt_lambda = regime.lambda.sqrt();
    let mut out = Vec::with_capacity(theta0.dim());
    for (h, t) in theta_hat.mu.iter().zip(&theta0.mu) {
        out.push((h - t) / regime.epsilon);
    }
    for (h, t) in theta_hat.sigma.iter().zip(&theta0.sigma) {
        out.push(sqrt_n * (h - t));
    }
    for (h, t) in theta_hat.alpha.iter().zip(&theta0.alpha) {
        out.push(sqrt_lambda * (h - t));
    }
    out
}

fn one_replication(design: &StudyDesign, regime: &RegimeConfig, rep: usize) -> McRow {
    let seed = derive_child(design.master_seed, REP_STREAM, rep as u64);
    let mut r = regime.clone();
    r.seed = seed;
    let outcome = simulate_path(&design.model, &design.theta0, &r, design.substeps).and_then(
        |(obs, _)| maximize_contrast(&obs, &design.model, &r, &design.optimizer),
    );
    match outcome {
        Ok(est) => {
            let std_error = standardized_error(&est.theta_hat, &design.theta0, regime);
            McRow {
                rep,
                seed,
                theta_hat: Some(est.theta_hat),
                lambda_hat: est.lambda_hat,
                converged: est.converged,
                error: None,
                std_error: Some(std_error),
            }
        }
        Err(e) => McRow {
            rep,
            seed,
            theta_hat: None,
            lambda_hat: f64::NAN,
            converged: false,
            error: Some(e.to_string()),
            std_error: None,
        },
    }
}

/// Runs `design.reps` simulate–estimate replications under `regime` in
/// parallel, with per-replication seeds derived from the master seed.
///
/// Fails when the regime or parameters are invalid, when the filter exponent
/// is outside the family's admissible range, or when more than 20% of the
/// replications fail.
pub fn run_replications(design: &StudyDesign, regime: &RegimeConfig) -> Result<McTable> {
    regime.validate()?;
    design.model.validate_theta(&design.theta0)?;
    design.model.validate_domain(&design.optimizer.domain)?;
    if design.reps == 0 {
        return Err(Error::Config("a study needs at least one replication".into()));
    }
    if design.substeps == 0 {
        return Err(Error::Config("a study needs at least one Euler substep".into()));
    }
    let verdict = validate_rho(&design.model.density, regime.rho);
    if !verdict.admissible {
        return Err(Error::Config(verdict.reason));
    }
    let rows: Vec<McRow> = (0..design.reps)
        .into_par_iter()
        .map(|rep| one_replication(design, regime, rep))
        .collect();
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    if 5 * failures > design.reps {
        let first = rows
            .iter()
            .find_map(|r| r.error.as_deref())
            .unwrap_or("unknown failure");
        return Err(Error::Study(format!(
            "{failures} of {} replications failed (more than 20%); first error: {first}",
            design.reps
        )));
    }
    Ok(McTable {
        rows,
        metadata: McMetadata {
            model_id: design.model_id.clone(),
            regime: regime.clone(),
            theta0: design.theta0.clone(),
            reps: design.reps,
            master_seed: design.master_seed,
            substeps: design.substeps,
        },
    })
}

/// Per-rung summary of a consistency ladder.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RungSummary {
    pub regime: RegimeConfig,
    pub reps: usize,
    pub converged: usize,
    /// Root-mean-square error of each flattened parameter component over the
    /// converged rows.
    pub rmse: Vec<f64>,
    /// Root-mean-square error of the intensity estimate around the rung's
    /// true intensity.
    pub lambda_rmse: f64,
}

/// Outcome of a consistency ladder run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LadderReport {
    pub rungs: Vec<RungSummary>,
    /// Whether every component's RMSE decreases along the ladder, tolerating
    /// at most one rise of at most 10% per component. `None` for a single
    /// rung.
    pub monotone: Option<bool>,
    pub notes: Vec<String>,
}

/// A ladder report together with the per-rung replication tables.
#[derive(Clone, Debug)]
pub struct LadderOutcome {
    pub report: LadderReport,
    pub tables: Vec<McTable>,
}

fn rung_summary(table: &McTable, theta0: &ParameterPoint) -> Result<RungSummary> {
    let truth = theta0.flatten();
    let d = truth.len();
    let mut sq = vec![0.0; d];
    let mut lam_sq = 0.0;
    let mut m = 0usize;
    for row in table.converged_rows() {
        let est = row.theta_hat.as_ref().expect("converged rows carry estimates").flatten();
        for c in 0..d {
            let e = est[c] - truth[c];
            sq[c] += e * e;
        }
        let le = row.lambda_hat - table.metadata.regime.lambda;
        lam_sq += le * le;
        m += 1;
    }
    if m < 2 {
        return Err(Error::Study(format!(
            "rung with n = {} produced only {m} converged replications; \
             cannot summarize errors",
            table.metadata.regime.n
        )));
    }
    let mf = m as f64;
    Ok(RungSummary {
        regime: table.metadata.regime.clone(),
        reps: table.rows.len(),
        converged: m,
        rmse: sq.iter().map(|s| (s / mf).sqrt()).collect(),
        lambda_rmse: (lam_sq / mf).sqrt(),
    })
}

/// Smallest absolute jump coefficient along the noise-free limit path, used
/// as the coefficient bound of the ladder's tail diagnostic.
pub fn min_jump_coefficient(model: &ModelSpec, theta0: &ParameterPoint) -> Result<f64> {
    let path = solve_limit_path(model, &theta0.mu, 2001)?;
    let mut c_min = f64::INFINITY;
    for &x in &path.values {
        c_min = c_min.min(model.c(x, &theta0.alpha).abs());
    }
    Ok(c_min)
}

/// Runs the replication study on every rung of a regime ladder and assesses
/// whether the per-component errors shrink.
///
/// The ladder is first validated against the rate conditions (with the
/// density-dependent tail diagnostic when the jump coefficient admits a
/// positive lower bound along the limit path); a gating violation aborts the
/// study. Each rung gets its own master seed derived from the study seed and
/// the rung index.
pub fn consistency_ladder(design: &StudyDesign, ladder: &[RegimeConfig]) -> Result<LadderOutcome> {
    let c_min = min_jump_coefficient(&design.model, &design.theta0)?;
    let diag = if c_min > 0.0 && c_min.is_finite() {
        let tail = TailContext {
            family: design.model.density.clone(),
            alpha0: design.theta0.alpha.clone(),
            c_min,
        };
        validate_regime_ladder_with_density(ladder, &tail)?
    } else {
        validate_regime_ladder(ladder)?
    };
    if !diag.ok {
        let bad: Vec<String> = diag
            .conditions
            .iter()
            .filter(|c| c.gating && c.status == crate::model::TrendStatus::Violating)
            .map(|c| c.name.clone())
            .collect();
        return Err(Error::Study(format!(
            "regime ladder violates gating rate conditions: {}",
            bad.join("; ")
        )));
    }

    let mut tables = Vec::with_capacity(ladder.len());
    let mut rungs = Vec::with_capacity(ladder.len());
    let mut notes = Vec::new();
    for (idx, regime) in ladder.iter().enumerate() {
        let mut rung_design = design.clone();
        rung_design.master_seed = derive_child(design.master_seed, RUNG_STREAM, idx as u64);
        let table = run_replications(&rung_design, regime)?;
        rungs.push(rung_summary(&table, &design.theta0)?);
        tables.push(table);
    }

    let monotone = if rungs.len() < 2 {
        None
    } else {
        let d = design.theta0.dim();
        let mut all_ok = true;
        for c in 0..d {
            let series: Vec<f64> = rungs.iter().map(|r| r.rmse[c]).collect();
            let mut rises = 0usize;
            let mut worst = 0.0_f64;
            for w in series.windows(2) {
                if w[1] > w[0] {
                    rises += 1;
                    worst = worst.max(w[1] / w[0] - 1.0);
                }
            }
            let ok = rises <= 1 && worst <= 0.10;
            if !ok {
                all_ok = false;
                notes.push(format!(
                    "component {c}: RMSE series {series:?} rises {rises} time(s), \
                     worst rise {:.1}%",
                    100.0 * worst
                ));
            }
        }
        Some(all_ok)
    };
    for r in &rungs {
        notes.push(format!(
            "n = {}: {} of {} replications converged",
            r.regime.n, r.converged, r.reps
        ));
    }
    Ok(LadderOutcome { report: LadderReport { rungs, monotone, notes }, tables })
}

/// Joint and per-coordinate normality diagnostics for a replication table.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormalityReport {
    /// Sample mean of the standardized errors.
    pub mean: Vec<f64>,
    /// Sample covariance (rows) of the standardized errors.
    pub cov: Vec<Vec<f64>>,
    /// Asymptotic target covariance: the inverse assembled information.
    pub target: Vec<Vec<f64>>,
    /// `|cov - target|_F / |target|_F`.
    pub rel_frobenius_error: f64,
    /// Per-coordinate KS statistics of the whitened errors against N(0, 1).
    pub ks_stats: Vec<f64>,
    pub ks_p_values: Vec<f64>,
    pub converged_rows: usize,
    pub total_rows: usize,
    pub bonferroni_note: String,
}

/// Compares the empirical law of the standardized errors in `table` with the
/// centered normal whose covariance is the inverse of `info.assembled`.
///
/// The comparison has two complementary parts. The covariance match is the
/// relative Frobenius distance between the sample covariance and the inverse
/// information. Gaussian shape is tested separately: the sample is whitened
/// (centered and transformed by the inverse square root of its own
/// covariance, so first and second moments are exact by construction) and
/// each whitened coordinate is KS-tested against the standard normal. Using
/// the sample covariance for the whitening keeps the shape test from simply
/// re-testing the covariance match, which has its own looser tolerance.
pub fn normality_diagnostics(
    table: &McTable,
    info: &FisherInformation,
) -> Result<NormalityReport> {
    let d = info.assembled.nrows();
    let errs: Vec<&Vec<f64>> = table
        .converged_rows()
        .filter_map(|r| r.std_error.as_ref())
        .collect();
    let m = errs.len();
    if m < 100 {
        return Err(Error::Study(format!(
            "normality diagnostics need at least 100 converged replications, got {m}"
        )));
    }
    for e in &errs {
        if e.len() != d {
            return Err(Error::Study(format!(
                "standardized error length {} does not match the information dimension {d}",
                e.len()
            )));
        }
    }

    let mf = m as f64;
    let mut mean = vec![0.0; d];
    for e in &errs {
        for i in 0..d {
            mean[i] += e[i];
        }
    }
    for v in &mut mean {
        *v /= mf;
    }
    let mut cov = DMatrix::zeros(d, d);
    for e in &errs {
        for i in 0..d {
            for j in 0..d {
                cov[(i, j)] += (e[i] - mean[i]) * (e[j] - mean[j]);
            }
        }
    }
    cov /= mf - 1.0;

    let target = sym_inverse(&info.assembled, 1e-10)?;
    let rel_frobenius_error = frobenius(&(&cov - &target)) / frobenius(&target);

    // Whiten with the sample's own moments; a degenerate sample covariance
    // (a constant coordinate, say) has no whitening transform and is an
    // error rather than a silent fallback.
    let whiten = sym_sqrt(&sym_inverse(&cov, 1e-10)?, 1e-10)?;
    let mut ks_stats = Vec::with_capacity(d);
    let mut ks_p_values = Vec::with_capacity(d);
    for i in 0..d {
        let coord: Vec<f64> = errs
            .iter()
            .map(|e| (0..d).map(|j| whiten[(i, j)] * (e[j] - mean[j])).sum::<f64>())
            .collect();
        let res = ks_test(&coord, normal_cdf);
        ks_stats.push(res.statistic);
        ks_p_values.push(res.p_value);
    }

    let as_rows = |mat: &DMatrix<f64>| -> Vec<Vec<f64>> {
        (0..d).map(|i| (0..d).map(|j| mat[(i, j)]).collect()).collect()
    };
    Ok(NormalityReport {
        mean,
        cov: as_rows(&cov),
        target: as_rows(&target),
        rel_frobenius_error,
        ks_stats,
        ks_p_values,
        converged_rows: m,
        total_rows: table.rows.len(),
        bonferroni_note: format!(
            "KS p-values are reported unadjusted; for a joint test at level 0.01 \
             across {d} coordinates, compare each p-value to {:.2e}",
            0.01 / d as f64
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::LambdaMode;
    use crate::fisher::{fisher_information, QuadSpec};
    use crate::model::builtin;
    use crate::numeric::rng::chacha_from_u64;
    use rand_distr::Distribution;

    fn gamma_design(reps: usize) -> StudyDesign {
        let b = builtin("ou-gamma").unwrap();
        let mut optimizer = OptimizerOptions::new(b.domain.clone());
        optimizer.lambda_mode = LambdaMode::Estimated;
        StudyDesign {
            model: b.model.clone(),
            model_id: b.id.to_string(),
            theta0: b.theta0.clone(),
            optimizer,
            reps,
            master_seed: 0xA11CE,
            substeps: 4,
        }
    }

    fn synthetic_table(rows: usize, info: &FisherInformation, seed: u64) -> McTable {
        // Draw std_error ~ N(0, target) directly; theta_hat is irrelevant for
        // the normality diagnostics beyond being present.
        let b = builtin("ou-gamma").unwrap();
        let d = info.assembled.nrows();
        let target = sym_inverse(&info.assembled, 1e-12).unwrap();
        let half = sym_sqrt(&target, 1e-12).unwrap();
        let mut rng = chacha_from_u64(seed);
        let normal = rand_distr::Normal::new(0.0, 1.0).unwrap();
        let mut out = Vec::with_capacity(rows);
        for rep in 0..rows {
            let z: Vec<f64> = (0..d).map(|_| normal.sample(&mut rng)).collect();
            let e: Vec<f64> =
                (0..d).map(|i| (0..d).map(|j| half[(i, j)] * z[j]).sum()).collect();
            out.push(McRow {
                rep,
                seed: rep as u64,
                theta_hat: Some(b.theta0.clone()),
                lambda_hat: 10.0,
                converged: true,
                error: None,
                std_error: Some(e),
            });
        }
        McTable {
            rows: out,
            metadata: McMetadata {
                model_id: "ou-gamma".to_string(),
                regime: b.default_regime.clone(),
                theta0: b.theta0.clone(),
                reps: rows,
                master_seed: seed,
                substeps: 1,
            },
        }
    }

    #[test]
    fn standardized_error_applies_the_three_rates() {
        let b = builtin("ou-gamma").unwrap();
        let mut regime = b.default_regime.clone();
        regime.n = 400;
        regime.epsilon = 0.01;
        regime.lambda = 25.0;
        let theta_hat = ParameterPoint::new(vec![1.02], vec![0.99], vec![1.3, 1.6]);
        let e = standardized_error(&theta_hat, &b.theta0, &regime);
        assert!((e[0] - 2.0).abs() < 1e-10, "mu rate: {e:?}");
        assert!((e[1] + 0.2).abs() < 1e-10, "sigma rate: {e:?}");
        assert!((e[2] - 1.5).abs() < 1e-10, "alpha1 rate: {e:?}");
        assert!((e[3] + 2.0).abs() < 1e-10, "alpha2 rate: {e:?}");
    }

    #[test]
    fn synthetic_normal_rows_pass_the_diagnostics() {
        let b = builtin("ou-gamma").unwrap();
        let info = fisher_information(&b.model, &b.theta0, 200, &QuadSpec::default()).unwrap();
        let table = synthetic_table(10_000, &info, 0xBEEF);
        let report = normality_diagnostics(&table, &info).unwrap();
        assert!(
            report.rel_frobenius_error < 0.05,
            "relative covariance error {}",
            report.rel_frobenius_error
        );
        for (i, p) in report.ks_p_values.iter().enumerate() {
            assert!(*p > 0.01, "coordinate {i}: KS p = {p}");
        }
        assert_eq!(report.converged_rows, 10_000);
        assert_eq!(report.cov.len(), 4);
        assert_eq!(report.target.len(), 4);
    }

    #[test]
    fn degenerate_coordinate_is_rejected() {
        let b = builtin("ou-gamma").unwrap();
        let info = fisher_information(&b.model, &b.theta0, 200, &QuadSpec::default()).unwrap();
        let mut table = synthetic_table(2_000, &info, 0xD0D0);
        for row in &mut table.rows {
            if let Some(e) = row.std_error.as_mut() {
                e[2] = 0.3;
            }
        }
        // A constant coordinate makes the sample covariance singular, so the
        // whitening transform does not exist.
        let err = normality_diagnostics(&table, &info).unwrap_err();
        assert_eq!(err.kind(), "numerical");
    }

    #[test]
    fn skewed_coordinate_fails_the_shape_test() {
        let b = builtin("ou-gamma").unwrap();
        let info = fisher_information(&b.model, &b.theta0, 200, &QuadSpec::default()).unwrap();
        let mut table = synthetic_table(2_000, &info, 0x5EED);
        // Square one coordinate: mean and variance stay finite, the shape is
        // strongly right-skewed, so only the KS part should object.
        for row in &mut table.rows {
            if let Some(e) = row.std_error.as_mut() {
                e[3] = e[3] * e[3];
            }
        }
        let report = normality_diagnostics(&table, &info).unwrap();
        assert!(
            report.ks_p_values[3] < 1e-6,
            "squared coordinate must fail the shape test, p = {}",
            report.ks_p_values[3]
        );
        assert!(
            report.ks_p_values[0] > 0.01,
            "untouched coordinate should keep passing, p = {}",
            report.ks_p_values[0]
        );
    }

    #[test]
    fn normality_needs_enough_converged_rows() {
        let b = builtin("ou-gamma").unwrap();
        let info = fisher_information(&b.model, &b.theta0, 200, &QuadSpec::default()).unwrap();
        let table = synthetic_table(50, &info, 0x50);
        let err = normality_diagnostics(&table, &info).unwrap_err();
        assert_eq!(err.kind(), "study");
    }

    #[test]
    fn replication_tables_are_reproducible() {
        let design = gamma_design(6);
        let mut regime = builtin("ou-gamma").unwrap().default_regime.clone();
        regime.n = 400;
        regime.lambda = 10.0;
        let t1 = run_replications(&design, &regime).unwrap();
        let t2 = run_replications(&design, &regime).unwrap();
        assert_eq!(t1.to_csv(), t2.to_csv(), "tables must be bit-identical");
        assert_eq!(t1.rows.len(), 6);
        // Seeds are pairwise distinct and derived, not sequential.
        let mut seeds: Vec<u64> = t1.rows.iter().map(|r| r.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 6);
    }

    #[test]
    fn inadmissible_rho_is_refused_before_any_work() {
        let design = gamma_design(4);
        let mut regime = builtin("ou-gamma").unwrap().default_regime.clone();
        regime.rho = 0.30; // outside (0, 0.25) for the gamma family
        let err = run_replications(&design, &regime).unwrap_err();
        assert_eq!(err.kind(), "config");
    }

    #[test]
    fn failure_budget_is_enforced() {
        let mut design = gamma_design(5);
        // A domain whose dimensions do not match the model makes every
        // replication fail at estimation time.
        let bad = ParameterPoint::new(vec![0.2, 0.2], vec![0.2], vec![0.2, 1.05]);
        let bad_hi = ParameterPoint::new(vec![3.0, 3.0], vec![3.0], vec![5.0, 8.0]);
        design.optimizer.domain =
            crate::model::ParameterDomain::new(bad, bad_hi).unwrap();
        let regime = builtin("ou-gamma").unwrap().default_regime.clone();
        let err = run_replications(&design, &regime).unwrap_err();
        // The mismatch is caught by the up-front domain validation.
        assert_eq!(err.kind(), "model");
    }

    #[test]
    fn failure_budget_trips_on_runtime_errors() {
        let design = gamma_design(5);
        let mut regime = builtin("ou-gamma").unwrap().default_regime.clone();
        regime.n = 100;
        // epsilon = 0 simulates fine (noise-free limit plus jumps) but the
        // filter refuses it, so every replication fails at estimation time.
        regime.epsilon = 0.0;
        let err = run_replications(&design, &regime).unwrap_err();
        assert_eq!(err.kind(), "study");
        assert!(err.to_string().contains("more than 20%"), "{err}");
    }

    #[test]
    fn ladder_gating_refuses_divergent_intensity() {
        let design = gamma_design(4);
        let ladder = vec![
            RegimeConfig { n: 500, epsilon: 1e-2, lambda: 500.0, rho: 0.2, v: 1.0, seed: 1 },
            RegimeConfig { n: 2000, epsilon: 1e-2, lambda: 2000.0, rho: 0.2, v: 1.0, seed: 2 },
        ];
        let err = consistency_ladder(&design, &ladder).unwrap_err();
        assert_eq!(err.kind(), "study");
        assert!(err.to_string().contains("lambda^2 / n"));
    }

    #[test]
    fn two_rung_ladder_produces_summaries() {
        let design = gamma_design(8);
        let ladder = vec![
            RegimeConfig { n: 400, epsilon: 1.0 / 50.0, lambda: 8.0, rho: 0.2, v: 1.0, seed: 0 },
            RegimeConfig {
                n: 1600,
                epsilon: 1.0 / 100.0,
                lambda: 16.0,
                rho: 0.2,
                v: 1.0,
                seed: 0,
            },
        ];
        let outcome = consistency_ladder(&design, &ladder).unwrap();
        assert_eq!(outcome.report.rungs.len(), 2);
        assert_eq!(outcome.tables.len(), 2);
        assert!(outcome.report.monotone.is_some());
        for rung in &outcome.report.rungs {
            assert_eq!(rung.rmse.len(), 4);
            assert!(rung.converged >= 2);
            assert!(rung.rmse.iter().all(|v| v.is_finite() && *v >= 0.0));
        }
        // Different rungs use different derived master seeds.
        let s0: Vec<u64> = outcome.tables[0].rows.iter().map(|r| r.seed).collect();
        let s1: Vec<u64> = outcome.tables[1].rows.iter().map(|r| r.seed).collect();
        assert_ne!(s0, s1);
    }

    #[test]
    fn csv_has_stable_shape_and_nan_markers() {
        let b = builtin("ou-gamma").unwrap();
        let mut table = synthetic_table(3, &fisher_information(
            &b.model,
            &b.theta0,
            100,
            &QuadSpec::default(),
        )
        .unwrap(), 9);
        table.rows[1].theta_hat = None;
        table.rows[1].std_error = None;
        table.rows[1].lambda_hat = f64::NAN;
        table.rows[1].converged = false;
        table.rows[1].error = Some("boom, with a comma".to_string());
        let csv = table.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(
            lines[0],
            "rep,seed,converged,lambda_hat,mu_1,sigma_1,alpha_1,alpha_2,\
             stderr_1,stderr_2,stderr_3,stderr_4,error"
        );
        let failed: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(failed.len(), 13);
        assert_eq!(failed[2], "0");
        assert_eq!(failed[3], "nan");
        assert_eq!(failed[4], "nan");
        assert_eq!(failed[12], "boom; with a comma");
    }
}

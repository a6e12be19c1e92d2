//! Batch front-end used by the `jdsn` binary.
//!
//! Each command reads one JSON [`StudyConfig`] (or a `manifest.json` from a
//! previous run, whose embedded config is then used verbatim), writes its
//! artifacts into an output directory, and records a manifest with the
//! config, its SHA-256, the command name, and the crate version — enough to
//! re-run the command bit-identically. Orchestration here is single-threaded;
//! all parallelism lives in [`crate::mcstudy`] behind the rayon pool that
//! [`configure_workers`] sizes.
//!
//! Output conventions: CSV files carry a header row, `.` as the decimal
//! separator, and 17 significant digits (`{:.16e}`); JSON artifacts are
//! pretty-printed. Diagnostics and progress notes go to stderr; `check-rho`
//! is the only command that writes its report to stdout.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::config::{sha256_hex, StudyConfig};
use crate::error::{Error, Result};
use crate::estimate::{classify_increments, maximize_contrast};
use crate::fisher::{fisher_information, QuadSpec};
use crate::mcstudy::{
    consistency_ladder, min_jump_coefficient, normality_diagnostics, run_replications,
    standardized_error,
};
use crate::model::{
    validate_regime_ladder, validate_regime_ladder_with_density, validate_rho, LadderDiagnostics,
    RhoVerdict, TailContext,
};
use crate::numeric::rng::derive_child;
use crate::simulate::{simulate_path, ObservationRecord, SimulatedTruth};

/// Seed stream tag for the simulate/estimate commands (distinct from the
/// Monte Carlo replication and rung streams).
const SIM_STREAM: u64 = 0x51AE;

fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}

/// Reads a study config from `path`. A manifest written by a previous run is
/// recognized by its `config_sha256` field and unwrapped to its embedded
/// config, so `--config <out>/manifest.json` re-runs that study exactly.
pub fn load_config(path: &Path) -> Result<StudyConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let config_value = if value.get("config_sha256").is_some() {
        value
            .get("config")
            .cloned()
            .ok_or_else(|| Error::Config("manifest carries config_sha256 but no config".into()))?
    } else {
        value
    };
    Ok(serde_json::from_value(config_value)?)
}

/// Output directory precedence: `--out`, then the config's `out_dir`, then
/// `./jdsn-out`.
pub fn resolve_out_dir(cli_out: Option<&Path>, cfg: &StudyConfig) -> PathBuf {
    match (cli_out, &cfg.out_dir) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(d)) => PathBuf::from(d),
        (None, None) => PathBuf::from("jdsn-out"),
    }
}

/// Sizes the global rayon pool from `--workers` or, failing that, the
/// `JDSN_WORKERS` environment variable. Returns the explicit worker count,
/// if any; `None` leaves rayon's default.
pub fn configure_workers(explicit: Option<usize>) -> Result<Option<usize>> {
    let requested = match explicit {
        Some(n) => Some(n),
        None => match std::env::var("JDSN_WORKERS") {
            Ok(s) => Some(s.trim().parse::<usize>().map_err(|_| {
                Error::Config(format!("JDSN_WORKERS must be a positive integer, got {s:?}"))
            })?),
            Err(_) => None,
        },
    };
    if let Some(n) = requested {
        if n == 0 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        // A second initialization attempt cannot resize the pool; ignore it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(requested)
}

/// Renders an error as the one-line JSON object the binary prints on stderr.
pub fn error_json(err: &Error) -> String {
    json!({"error": {"kind": err.kind(), "message": err.to_string()}}).to_string()
}

fn write_manifest(cfg: &StudyConfig, command: &str, out_dir: &Path) -> Result<()> {
    let canon = cfg.canonical_json()?;
    let manifest = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config_sha256": sha256_hex(&canon),
        "config": serde_json::from_str::<serde_json::Value>(&canon)?,
    });
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_text(&out_dir.join("manifest.json"), &text)
}

fn path_csv(obs: &ObservationRecord) -> String {
    let mut s = String::from("t,X\n");
    for (t, x) in obs.times.iter().zip(&obs.values) {
        let _ = writeln!(s, "{},{}", fmt_f64(*t), fmt_f64(*x));
    }
    s
}

fn truth_csv(truth: &SimulatedTruth) -> String {
    let mut s = String::from("jump_time,mark,interval_index\n");
    for j in &truth.jumps {
        let _ = writeln!(s, "{},{},{}", fmt_f64(j.time), fmt_f64(j.mark), j.interval);
    }
    s
}

/// Simulates `reps` observed paths and writes one path/truth CSV pair per
/// replication (`path.csv`/`truth.csv` when `reps == 1`, else
/// `path_0000.csv`, ...). Path files carry the observation grid `t, X`;
/// truth files carry one row per jump: time, mark, containing interval.
pub fn cmd_simulate(cfg: &StudyConfig, out_dir: &Path, verbose: bool) -> Result<()> {
    let rs = cfg.resolve()?;
    fs::create_dir_all(out_dir)?;
    let reps = rs.design.reps;
    for i in 0..reps {
        let mut regime = rs.regime.clone();
        regime.seed = derive_child(cfg.master_seed, SIM_STREAM, i as u64);
        let (obs, truth) =
            simulate_path(&rs.design.model, &rs.design.theta0, &regime, rs.design.substeps)?;
        let (path_name, truth_name) = if reps == 1 {
            ("path.csv".to_string(), "truth.csv".to_string())
        } else {
            (format!("path_{i:04}.csv"), format!("truth_{i:04}.csv"))
        };
        write_text(&out_dir.join(path_name), &path_csv(&obs))?;
        write_text(&out_dir.join(truth_name), &truth_csv(&truth))?;
        if verbose {
            eprintln!(
                "simulate rep {i}: seed {} jumps {} warnings {}",
                regime.seed,
                truth.jump_count,
                truth.warnings.len()
            );
        }
    }
    write_manifest(cfg, "simulate", out_dir)
}

/// Simulates one path under the resolved regime, runs the threshold filter
/// and the contrast maximizer, and writes `estimate.json` with the estimate,
/// the filter counts, and the rate-standardized errors against the truth.
pub fn cmd_estimate(cfg: &StudyConfig, out_dir: &Path, verbose: bool) -> Result<()> {
    let rs = cfg.resolve()?;
    fs::create_dir_all(out_dir)?;
    let mut regime = rs.regime.clone();
    regime.seed = derive_child(cfg.master_seed, SIM_STREAM, 0);
    let (obs, _truth) =
        simulate_path(&rs.design.model, &rs.design.theta0, &regime, rs.design.substeps)?;
    let labels = classify_increments(&obs, &regime, rs.design.model.density.support())?;
    let est = maximize_contrast(&obs, &rs.design.model, &regime, &rs.design.optimizer)?;
    let std_err = standardized_error(&est.theta_hat, &rs.design.theta0, &regime);
    if verbose {
        eprintln!(
            "estimate: converged {} after {} iterations ({} restarts), {} jump increments",
            est.converged, est.iterations, est.restarts, labels.n_jump
        );
    }
    let doc = json!({
        "model": cfg.model,
        "regime": regime,
        "theta0": rs.design.theta0,
        "theta_hat": est.theta_hat,
        "lambda_hat": est.lambda_hat,
        "contrast_value": est.contrast_value,
        "converged": est.converged,
        "iterations": est.iterations,
        "restarts": est.restarts,
        "n_continuous": est.n_continuous,
        "n_jump": est.n_jump,
        "threshold": labels.threshold,
        "standardized_error": std_err,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    write_text(&out_dir.join("estimate.json"), &text)?;
    write_manifest(cfg, "estimate", out_dir)
}

/// Computes the limit information matrix at the configured truth and writes
/// it to `fisher.csv` (row-major, with a block-offset comment header).
pub fn cmd_fisher(cfg: &StudyConfig, out_dir: &Path, verbose: bool) -> Result<()> {
    let rs = cfg.resolve()?;
    fs::create_dir_all(out_dir)?;
    let info = fisher_information(
        &rs.design.model,
        &rs.design.theta0,
        rs.fisher_time_steps,
        &QuadSpec::default(),
    )?;
    if verbose {
        eprintln!("fisher: assembled {0}x{0} information matrix", info.assembled.nrows());
    }
    write_text(&out_dir.join("fisher.csv"), &info.to_csv())?;
    write_manifest(cfg, "fisher", out_dir)
}

/// Runs the Monte Carlo study. With a single regime this writes
/// `mctable.csv` (plus `normality.json` when requested); with a ladder it
/// writes one `mctable_rung<i>.csv` per rung and the trend report
/// `ladder.json`.
pub fn cmd_mc(cfg: &StudyConfig, out_dir: &Path, verbose: bool) -> Result<()> {
    let rs = cfg.resolve()?;
    fs::create_dir_all(out_dir)?;
    if let Some(ladder) = &rs.ladder {
        if rs.normality {
            return Err(Error::Config(
                "normality diagnostics need a single regime; run mc on one rung instead of a ladder"
                    .into(),
            ));
        }
        let outcome = consistency_ladder(&rs.design, ladder)?;
        for (idx, table) in outcome.tables.iter().enumerate() {
            write_text(&out_dir.join(format!("mctable_rung{idx}.csv")), &table.to_csv())?;
            if verbose {
                eprintln!(
                    "mc rung {idx}: {} of {} replications converged",
                    outcome.report.rungs[idx].converged, outcome.report.rungs[idx].reps
                );
            }
        }
        let mut text = serde_json::to_string_pretty(&outcome.report)?;
        text.push('\n');
        write_text(&out_dir.join("ladder.json"), &text)?;
    } else {
        let table = run_replications(&rs.design, &rs.regime)?;
        if verbose {
            eprintln!(
                "mc: {} of {} replications converged",
                table.converged_rows().count(),
                table.rows.len()
            );
        }
        write_text(&out_dir.join("mctable.csv"), &table.to_csv())?;
        if rs.normality {
            let info = fisher_information(
                &rs.design.model,
                &rs.design.theta0,
                rs.fisher_time_steps,
                &QuadSpec::default(),
            )?;
            let report = normality_diagnostics(&table, &info)?;
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            write_text(&out_dir.join("normality.json"), &text)?;
        }
    }
    write_manifest(cfg, "mc", out_dir)
}

/// The `check-rho` report: one admissibility verdict per configured regime
/// and, when a ladder is present, the rate-condition trend diagnostics.
#[derive(Clone, Debug)]
pub struct RhoReport {
    pub verdicts: Vec<RhoVerdict>,
    pub ladder: Option<LadderDiagnostics>,
}

impl RhoReport {
    /// The JSON document printed on stdout.
    pub fn to_json(&self) -> Result<String> {
        let doc = json!({"verdicts": self.verdicts, "ladder": self.ladder});
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// The error this report implies, if any: an inadmissible exponent is a
    /// configuration error, a violated ladder gating condition a study error.
    pub fn failure(&self) -> Option<Error> {
        if let Some(v) = self.verdicts.iter().find(|v| !v.admissible) {
            return Some(Error::Config(v.reason.clone()));
        }
        if let Some(diag) = &self.ladder {
            if !diag.ok {
                let names: Vec<&str> = diag
                    .conditions
                    .iter()
                    .filter(|c| c.gating && c.status == crate::model::TrendStatus::Violating)
                    .map(|c| c.name.as_str())
                    .collect();
                return Some(Error::Study(format!(
                    "ladder violates gating rate conditions: {}",
                    names.join("; ")
                )));
            }
        }
        None
    }
}

/// Builds the rho/ladder admissibility report for a config without running
/// any simulation.
pub fn check_rho_report(cfg: &StudyConfig) -> Result<RhoReport> {
    let rs = cfg.resolve()?;
    let family = &rs.design.model.density;
    let (verdicts, ladder) = match &rs.ladder {
        Some(ladder) => {
            let verdicts = ladder.iter().map(|r| validate_rho(family, r.rho)).collect();
            let c_min = min_jump_coefficient(&rs.design.model, &rs.design.theta0)?;
            let diag = if c_min > 0.0 && c_min.is_finite() {
                let tail = TailContext {
                    family: family.clone(),
                    alpha0: rs.design.theta0.alpha.clone(),
                    c_min,
                };
                validate_regime_ladder_with_density(ladder, &tail)?
            } else {
                validate_regime_ladder(ladder)?
            };
            (verdicts, Some(diag))
        }
        None => (vec![validate_rho(family, rs.regime.rho)], None),
    };
    Ok(RhoReport { verdicts, ladder })
}

/// Prints the admissibility report on stdout, then fails with exit code 2
/// (inadmissible exponent) or 3 (violated ladder gating condition) when the
/// configured rates are unusable.
pub fn cmd_check_rho(cfg: &StudyConfig) -> Result<()> {
    let report = check_rho_report(cfg)?;
    println!("{}", report.to_json()?);
    match report.failure() {
        Some(err) => Err(err),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RegimeConfig;

    fn small_cfg() -> StudyConfig {
        let mut cfg = StudyConfig::for_model("ou-gamma", 42);
        cfg.reps = 3;
        cfg.substeps = 4;
        cfg.regime = Some(RegimeConfig {
            n: 200,
            epsilon: 0.02,
            lambda: 8.0,
            rho: 0.2,
            v: 1.0,
            seed: 1,
        });
        cfg
    }

    #[test]
    fn simulate_writes_per_rep_files_and_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_cfg();
        cmd_simulate(&cfg, dir.path(), false).unwrap();
        for i in 0..3 {
            let p = fs::read_to_string(dir.path().join(format!("path_{i:04}.csv"))).unwrap();
            assert!(p.starts_with("t,X\n"));
            assert_eq!(p.lines().count(), 202);
            let t = fs::read_to_string(dir.path().join(format!("truth_{i:04}.csv"))).unwrap();
            assert!(t.starts_with("jump_time,mark,interval_index\n"));
        }
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
                .unwrap();
        assert_eq!(manifest["command"], "simulate");
        assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
        assert_eq!(manifest["config"]["model"], "ou-gamma");
    }

    #[test]
    fn single_rep_simulate_uses_unnumbered_names() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small_cfg();
        cfg.reps = 1;
        cmd_simulate(&cfg, dir.path(), false).unwrap();
        assert!(dir.path().join("path.csv").exists());
        assert!(dir.path().join("truth.csv").exists());
    }

    #[test]
    fn manifest_round_trips_through_load_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_cfg();
        cmd_simulate(&cfg, dir.path(), false).unwrap();
        let back = load_config(&dir.path().join("manifest.json")).unwrap();
        assert_eq!(back, cfg);
        // A bare config file loads identically.
        let raw = dir.path().join("cfg.json");
        fs::write(&raw, cfg.canonical_json().unwrap()).unwrap();
        assert_eq!(load_config(&raw).unwrap(), cfg);
    }

    #[test]
    fn check_rho_flags_inadmissible_exponent() {
        let mut cfg = small_cfg();
        cfg.regime.as_mut().unwrap().rho = 0.3; // outside (0, 1/4) for gamma
        let report = check_rho_report(&cfg).unwrap();
        assert!(!report.verdicts[0].admissible);
        let err = report.failure().unwrap();
        assert_eq!(err.kind(), "config");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn check_rho_flags_divergent_ladder() {
        let mut cfg = small_cfg();
        let mut r1 = cfg.regime.clone().unwrap();
        let mut r2 = r1.clone();
        r1.n = 400;
        r1.lambda = 10.0;
        r2.n = 800;
        r2.epsilon = 0.01;
        r2.lambda = 400.0; // lambda^2 / n rises 0.25 -> 200
        cfg.regime = None;
        cfg.ladder = Some(vec![r1, r2]);
        let report = check_rho_report(&cfg).unwrap();
        let err = report.failure().unwrap();
        assert_eq!(err.kind(), "study");
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("lambda^2 / n"));
    }

    #[test]
    fn out_dir_precedence_is_cli_then_config_then_default() {
        let mut cfg = small_cfg();
        assert_eq!(resolve_out_dir(None, &cfg), PathBuf::from("jdsn-out"));
        cfg.out_dir = Some("from-config".into());
        assert_eq!(resolve_out_dir(None, &cfg), PathBuf::from("from-config"));
        assert_eq!(
            resolve_out_dir(Some(Path::new("from-cli")), &cfg),
            PathBuf::from("from-cli")
        );
    }

    #[test]
    fn error_json_is_one_line_with_kind_and_message() {
        let s = error_json(&Error::Config("bad".into()));
        assert_eq!(s, r#"{"error":{"kind":"config","message":"config error: bad"}}"#);
    }
}

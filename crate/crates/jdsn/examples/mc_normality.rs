//! Asymptotic normality: standardized estimation errors against the inverse
//! limit information.
//!
//! In a deep regime the vector of standardized errors
//!
//! ```text
//! ( (mu_hat - mu0)/eps,  sqrt(n)(sigma_hat - sigma0),  sqrt(lambda)(alpha_hat - alpha0) )
//! ```
//!
//! is approximately `N(0, I^{-1})` with `I` the limit information matrix.
//! The study runs a few hundred replications, compares the empirical
//! covariance of the standardized errors with `I^{-1}` in relative Frobenius
//! distance, then whitens the errors with `I^{1/2}` and applies a
//! Kolmogorov–Smirnov test against the standard normal to every coordinate.
//!
//! Run with: `cargo run --release --example mc_normality`

use jdsn::estimate::OptimizerOptions;
use jdsn::fisher::{fisher_information, QuadSpec};
use jdsn::mcstudy::{normality_diagnostics, run_replications, StudyDesign};
use jdsn::model::{builtin, RegimeConfig};

fn main() -> jdsn::Result<()> {
    let built = builtin("ou-gamma")?;
    let regime = RegimeConfig {
        n: 8000,
        epsilon: 1.0 / 200.0,
        lambda: 40.0,
        rho: 0.24,
        v: 1.0,
        seed: 0, // replaced per replication
    };
    let design = StudyDesign {
        model: built.model.clone(),
        model_id: "ou-gamma".into(),
        theta0: built.theta0.clone(),
        optimizer: OptimizerOptions::new(built.domain.clone()),
        reps: 150,
        master_seed: 0x0DDBA11, // any fixed seed works
        substeps: 8,
    };

    println!(
        "running {} replications at n = {}, eps = {}, lambda = {} ...",
        design.reps, regime.n, regime.epsilon, regime.lambda
    );
    let table = run_replications(&design, &regime)?;
    let info = fisher_information(&built.model, &built.theta0, 2000, &QuadSpec::default())?;
    let report = normality_diagnostics(&table, &info)?;

    println!(
        "\n{} of {} replications converged and enter the diagnostics",
        report.converged_rows, report.total_rows
    );
    println!("\nmean standardized error (should be near 0):");
    let names = ["mu_1", "sigma_1", "alpha_1", "alpha_2"];
    for (name, m) in names.iter().zip(&report.mean) {
        println!("    {name:>8}: {m:+.4}");
    }
    println!("\nempirical covariance vs inverse information, diagonal:");
    println!("{:>8} {:>12} {:>12}", "coord", "empirical", "target");
    for i in 0..names.len() {
        println!("{:>8} {:12.5} {:12.5}", names[i], report.cov[i][i], report.target[i][i]);
    }
    println!(
        "\nrelative Frobenius distance between the matrices: {:.4}",
        report.rel_frobenius_error
    );
    println!("\nKolmogorov-Smirnov on the whitened coordinates (H0: standard normal):");
    for i in 0..names.len() {
        println!(
            "    {:>8}: D = {:.4}, p = {:.4}",
            names[i], report.ks_stats[i], report.ks_p_values[i]
        );
    }
    println!("\n{}", report.bonferroni_note);
    Ok(())
}

//! Estimate all parameters from a single simulated path.
//!
//! The estimator splits the `n` observed increments with a threshold: an
//! increment whose noise-normalized magnitude `|Delta X| / eps` exceeds
//! `v / n^rho` is attributed to a jump, everything else to the continuous
//! part. A Gaussian quasi-likelihood over the continuous increments yields
//! the drift and diffusion parameters `(mu, sigma)`, the mark log-likelihood
//! over the jump increments yields the jump-density parameters `alpha`, and
//! the number of flagged increments estimates the intensity `lambda` — no
//! truncation of the mark density anywhere.
//!
//! The run prints the estimate next to the truth together with the
//! rate-standardized errors `((mu_hat - mu0)/eps, sqrt(n)(sigma_hat -
//! sigma0), sqrt(lambda)(alpha_hat - alpha0))`, which the asymptotic theory
//! sends to mean-zero normals with covariance given by the inverse limit
//! information (see the `fisher_matrix` example).
//!
//! Run with: `cargo run --release --example estimate_once`

use jdsn::estimate::{maximize_contrast, OptimizerOptions};
use jdsn::mcstudy::standardized_error;
use jdsn::model::{builtin, RegimeConfig};
use jdsn::simulate::simulate_path;

fn main() -> jdsn::Result<()> {
    let built = builtin("ou-gamma")?;
    let regime = RegimeConfig {
        n: 2000,
        epsilon: 0.01,
        lambda: 20.0,
        rho: 0.2,
        v: 1.0,
        seed: 7,
    };

    let (obs, truth) = simulate_path(&built.model, &built.theta0, &regime, 8)?;
    println!(
        "simulated ou-gamma path: n = {}, eps = {}, lambda = {} ({} actual jumps)",
        regime.n, regime.epsilon, regime.lambda, truth.jump_count
    );

    let opts = OptimizerOptions::new(built.domain.clone());
    let est = maximize_contrast(&obs, &built.model, &regime, &opts)?;

    println!(
        "\noptimizer: converged = {}, iterations = {}, restarts = {}",
        est.converged, est.iterations, est.restarts
    );
    println!(
        "filter: {} continuous + {} jump increments -> lambda_hat = {}",
        est.n_continuous, est.n_jump, est.lambda_hat
    );

    let names = ["mu_1", "sigma_1", "alpha_1", "alpha_2"];
    let hat = est.theta_hat.flatten();
    let truth_flat = built.theta0.flatten();
    println!("\n{:>8} {:>12} {:>12} {:>14}", "param", "truth", "estimate", "standardized");
    let std_err = standardized_error(&est.theta_hat, &built.theta0, &regime);
    for i in 0..hat.len() {
        println!(
            "{:>8} {:12.6} {:12.6} {:14.6}",
            names[i], truth_flat[i], hat[i], std_err[i]
        );
    }
    println!(
        "\nstandardizing rates: 1/eps = {} for mu, sqrt(n) = {:.2} for sigma, sqrt(lambda) = {:.2} for alpha",
        1.0 / regime.epsilon,
        (regime.n as f64).sqrt(),
        regime.lambda.sqrt()
    );
    Ok(())
}

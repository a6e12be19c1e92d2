//! Simulate one observed path of the small-noise jump diffusion and compare
//! it with its noise-free limit.
//!
//! The model is an Ornstein–Uhlenbeck drift with unit diffusion and gamma
//! jump marks,
//!
//! ```text
//! dX_t = -mu X_t dt + eps sigma dW_t + eps dZ_t,    X_0 = 1,
//! ```
//!
//! observed at `t_k = k/n` on the unit interval. As `eps -> 0` the path
//! collapses onto the deterministic flow `x_t = exp(-mu t)`, and every jump
//! leaves a spike of order `eps` in one observed increment. The example
//! prints the simulated jumps, shows how far the observation strays from the
//! limit path, and verifies that the increments flagged by the threshold
//! filter are exactly the ones that contain jumps.
//!
//! Run with: `cargo run --example simulate_path`

use jdsn::estimate::classify_increments;
use jdsn::model::{builtin, RegimeConfig};
use jdsn::simulate::{simulate_path, solve_limit_path};

fn main() -> jdsn::Result<()> {
    let built = builtin("ou-gamma")?;
    let regime = RegimeConfig {
        n: 500,
        epsilon: 0.02,
        lambda: 10.0,
        rho: 0.2,
        v: 1.0,
        seed: 20260817,
    };
    let substeps = 16;

    let (obs, truth) = simulate_path(&built.model, &built.theta0, &regime, substeps)?;
    let limit = solve_limit_path(&built.model, &built.theta0.mu, 1001)?;

    println!(
        "model ou-gamma: theta0 = (mu {:?}, sigma {:?}, alpha {:?}), x0 = {}",
        built.theta0.mu, built.theta0.sigma, built.theta0.alpha, built.model.x0
    );
    println!(
        "regime: n = {}, eps = {}, lambda = {}, seed = {}\n",
        regime.n, regime.epsilon, regime.lambda, regime.seed
    );

    println!("{} jumps hit the unit interval:", truth.jump_count);
    println!("{:>10} {:>12} {:>10}", "time", "mark", "interval");
    for j in &truth.jumps {
        println!("{:10.6} {:12.6} {:>10}", j.time, j.mark, j.interval);
    }

    // The observation should hug the limit path to O(eps) between jumps.
    let mut max_gap: f64 = 0.0;
    for (t, x) in obs.times.iter().zip(&obs.values) {
        max_gap = max_gap.max((x - limit.at(*t)).abs());
    }
    println!("\nmax |X_t - x_t| over the grid: {max_gap:.6}  (noise scale eps = {})", regime.epsilon);

    // Filtered classification vs the simulated ground truth.
    let labels = classify_increments(&obs, &regime, built.model.density.support())?;
    let truth_set: std::collections::BTreeSet<usize> =
        truth.jumps.iter().map(|j| j.interval).collect();
    let flagged: std::collections::BTreeSet<usize> = labels.jump_indices().collect();
    let missed: Vec<_> = truth_set.difference(&flagged).collect();
    let spurious: Vec<_> = flagged.difference(&truth_set).collect();
    println!(
        "\nthreshold filter (|u| > v/n^rho = {:.4}): {} of {} increments flagged as jumps",
        labels.threshold, labels.n_jump, regime.n
    );
    println!("missed jump intervals:   {missed:?}");
    println!("spurious jump intervals: {spurious:?}");
    Ok(())
}

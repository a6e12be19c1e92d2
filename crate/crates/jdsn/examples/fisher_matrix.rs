//! Compute the limit Fisher information and the asymptotic standard
//! deviations it implies.
//!
//! The information matrix is block diagonal across the three parameter
//! groups. With `x_t` the noise-free limit path and `z ~ f_alpha` a jump
//! mark,
//!
//! ```text
//! I_mu    = int_0^1 (da/dmu)^2 / b^2            (x_t) dt,
//! I_sigma = 2 int_0^1 (db/dsigma)^2 / b^2       (x_t) dt,
//! I_alpha = int_0^1 E[ s s^T ],  s = d/dalpha log{ f_alpha(z) },  z scaled by c(x_t, alpha)
//! ```
//!
//! and the standardized estimation errors converge to `N(0, I^{-1})`. For
//! the ou-gamma model all three blocks have closed forms, so the example
//! prints the quadrature result next to the exact values: `I_mu = (1 -
//! e^{-2})/2`, `I_sigma = 2`, and for gamma marks at `alpha0 = (rate 1,
//! shape 2)` the alpha block is `[[2, 1], [1, trigamma(2)]]`.
//!
//! Run with: `cargo run --example fisher_matrix`

use jdsn::fisher::{fisher_information, QuadSpec};
use jdsn::model::builtin;
use jdsn::numeric::linalg::sym_inverse;

fn print_block(name: &str, m: &nalgebra::DMatrix<f64>) {
    println!("{name} =");
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:12.8}", m[(i, j)])).collect();
        println!("    [{}]", row.join(", "));
    }
}

fn main() -> jdsn::Result<()> {
    let built = builtin("ou-gamma")?;
    let info = fisher_information(&built.model, &built.theta0, 2000, &QuadSpec::default())?;

    print_block("I_mu   ", &info.i_mu);
    println!("    exact: (1 - e^-2)/2 = {:.12}", (1.0 - (-2.0f64).exp()) / 2.0);
    print_block("I_sigma", &info.i_sigma);
    println!("    exact: 2");
    print_block("I_alpha", &info.i_alpha);
    println!("    exact: [[2, 1], [1, trigamma(2) = pi^2/6 - 1 = {:.12}]]",
        std::f64::consts::PI.powi(2) / 6.0 - 1.0);

    let inv = sym_inverse(&info.assembled, 1e-10)?;
    println!("\nasymptotic standard deviations (sqrt of the inverse's diagonal):");
    let names = ["mu_1", "sigma_1", "alpha_1", "alpha_2"];
    for (i, name) in names.iter().enumerate() {
        println!("    sd[{name}] = {:.6}", inv[(i, i)].sqrt());
    }
    println!(
        "\nso e.g. mu_hat has spread ~ eps * {:.3} and alpha_2_hat ~ sqrt(1/lambda) * {:.3}",
        inv[(0, 0)].sqrt(),
        inv[(3, 3)].sqrt()
    );
    Ok(())
}

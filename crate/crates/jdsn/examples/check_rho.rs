//! Check which threshold exponents `rho` each jump-mark family admits, and
//! run the rate diagnostics on a regime ladder.
//!
//! The filter flags an increment as a jump when `|Delta X| / eps` exceeds
//! `v / n^rho`. Pushing `rho` up shrinks the threshold and catches smaller
//! jumps, but push too far and ordinary Gaussian increments start crossing
//! it. How far is too far depends on how much mass the mark density puts
//! near the origin: a density with a pole or positive density at 0 (normal,
//! gamma with small shape, lognormal) forces a smaller `rho` than one whose
//! mass dies quickly at 0 (inverse Gaussian). The admissible exponents form
//! an open interval `(0, q/(2(q+2)))` determined by the family's small-`z`
//! behavior `f(z) ~ z^{q-1}`.
//!
//! A consistency study runs the estimator on a ladder of regimes with
//! `eps -> 0`, `n -> infinity`, `lambda -> infinity`; the ladder itself must
//! keep `eps * lambda` and `lambda^2 / n` shrinking or the jump part of the
//! data degenerates. `validate_regime_ladder` checks those trends rung by
//! rung.
//!
//! Run with: `cargo run --example check_rho`

use jdsn::mcstudy::min_jump_coefficient;
use jdsn::model::{
    builtin, validate_regime_ladder_with_density, validate_rho, RegimeConfig, TailContext,
};

fn main() -> jdsn::Result<()> {
    let families = ["ou-normal", "ou-gamma", "ou-ig", "ou-weibull", "ou-lognormal"];
    let rhos = [0.05, 0.10, 0.20, 0.30, 0.45];

    println!("admissible threshold exponents by family (o = admissible, x = not):\n");
    print!("{:>14}", "family \\ rho");
    for r in rhos {
        print!("{r:>8}");
    }
    println!("{:>16}", "open interval");
    for id in families {
        let built = builtin(id)?;
        print!("{:>14}", id);
        let mut range = (0.0, 0.0);
        for r in rhos {
            let verdict = validate_rho(&built.model.density, r);
            range = verdict.range;
            print!("{:>8}", if verdict.admissible { "o" } else { "x" });
        }
        println!("        ({:.4}, {:.4})", range.0, range.1);
    }

    // A three-rung ladder with eps*lambda and lambda^2/n both shrinking.
    let rung = |n: usize, epsilon: f64, lambda: f64| RegimeConfig {
        n,
        epsilon,
        lambda,
        rho: 0.2,
        v: 1.0,
        seed: 1,
    };
    let ladder = vec![
        rung(500, 1.0 / 50.0, 10.0),
        rung(2000, 1.0 / 100.0, 20.0),
        rung(8000, 1.0 / 200.0, 40.0),
    ];

    let built = builtin("ou-gamma")?;
    let tail = TailContext {
        family: built.model.density.clone(),
        alpha0: built.theta0.alpha.clone(),
        c_min: min_jump_coefficient(&built.model, &built.theta0)?,
    };
    let diag = validate_regime_ladder_with_density(&ladder, &tail)?;
    println!("\nladder diagnostics for ou-gamma over three rungs (rho = 0.2):");
    for c in &diag.conditions {
        println!(
            "  [{}] {:<48} {:?}",
            if c.gating { "gating" } else { " info " },
            c.name,
            c.status
        );
        let vals: Vec<String> = c.values.iter().map(|v| format!("{v:.4e}")).collect();
        println!("           values along rungs: [{}]", vals.join(", "));
    }
    println!("\nladder ok = {}", diag.ok);
    Ok(())
}

//! Contrast maximization: deterministic multistart Nelder–Mead over the
//! parameter box, followed by a projected-gradient polish with analytic
//! gradients.
//!
//! The contrast separates exactly into a continuous part in `(mu, sigma)` and
//! a jump part in `alpha`, so [`maximize_contrast`] maximizes the two blocks
//! independently; [`maximize_contrast_joint`] maximizes the sum over the full
//! box in one run (slower, used to validate the separation). All candidate
//! points are clamped into the box, start points come from a Halton sequence,
//! and every tie-break is deterministic, so results are reproducible bit for
//! bit.

use crate::error::{Error, Result};
use crate::estimate::contrast::{
    contrast_continuous, contrast_full, contrast_jump, grad_continuous, grad_jump,
};
use crate::estimate::filter::{classify_increments, FilterLabels};
use crate::model::{ModelSpec, ParameterDomain, ParameterPoint, RegimeConfig};
use crate::numeric::lowdisc::halton_point;
use crate::simulate::ObservationRecord;

/// How the jump contrast is scaled during optimization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LambdaMode {
    /// Use a known intensity (must be positive).
    Known(f64),
    /// Use the estimated intensity, i.e. the number of jump-labeled
    /// increments.
    Estimated,
}

/// Optimizer settings.
#[derive(Clone, Debug)]
pub struct OptimizerOptions {
    pub domain: ParameterDomain,
    /// Number of multistart points per block (at least 1).
    pub starts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub polish: bool,
    pub polish_iters: usize,
    pub lambda_mode: LambdaMode,
}

impl OptimizerOptions {
    pub fn new(domain: ParameterDomain) -> Self {
        OptimizerOptions {
            domain,
            starts: 8,
            max_iters: 2000,
            tol: 1e-9,
            polish: true,
            polish_iters: 200,
            lambda_mode: LambdaMode::Estimated,
        }
    }
}

/// Result of a contrast maximization.
#[derive(Clone, Debug)]
pub struct EstimationResult {
    pub theta_hat: ParameterPoint,
    /// Contrast value at the maximizer (jump part at the scale actually
    /// used).
    pub contrast_value: f64,
    /// The intensity estimate: the number of jump-labeled increments.
    pub lambda_hat: f64,
    /// Total Nelder–Mead iterations across starts and blocks.
    pub iterations: usize,
    /// Optimizer runs beyond the first, summed over blocks.
    pub restarts: usize,
    pub converged: bool,
    pub n_continuous: usize,
    pub n_jump: usize,
}

fn clamp_box(x: &mut [f64], lo: &[f64], hi: &[f64], margin_frac: f64) {
    for i in 0..x.len() {
        let m = margin_frac * (hi[i] - lo[i]);
        if !x[i].is_finite() {
            x[i] = 0.5 * (lo[i] + hi[i]);
        }
        x[i] = x[i].clamp(lo[i] + m, hi[i] - m);
    }
}

struct NmOutcome {
    x: Vec<f64>,
    f: f64,
    iterations: usize,
    converged: bool,
}

/// Nelder–Mead maximization over a box (candidates clamped inside).
fn nelder_mead_max<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    start: &[f64],
    lo: &[f64],
    hi: &[f64],
    max_iters: usize,
    tol: f64,
) -> NmOutcome {
    let d = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    simplex.push(start.to_vec());
    for i in 0..d {
        let mut v = start.to_vec();
        let step = 0.05 * (hi[i] - lo[i]);
        v[i] = if v[i] + step <= hi[i] { v[i] + step } else { v[i] - step };
        simplex.push(v);
    }
    let mut fv: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut iters = 0usize;
    let mut converged = false;

    while iters < max_iters {
        iters += 1;
        // Order best-first; stable index tie-break keeps runs deterministic.
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| fv[b].total_cmp(&fv[a]).then(a.cmp(&b)));
        let reordered: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let refv: Vec<f64> = order.iter().map(|&i| fv[i]).collect();
        simplex = reordered;
        fv = refv;

        // Convergence: simplex collapsed in both x and f.
        let xscale = 1.0 + simplex[0].iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
        let diam = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max)
            })
            .fold(0.0_f64, f64::max);
        let fspread = fv[0] - fv[d];
        if diam <= tol * xscale && fspread.abs() <= tol * (1.0 + fv[0].abs()) {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..d)
            .map(|i| simplex[..d].iter().map(|v| v[i]).sum::<f64>() / d as f64)
            .collect();
        let worst = simplex[d].clone();
        let fworst = fv[d];
        let fsecond = fv[d - 1];

        let mut reflected: Vec<f64> =
            centroid.iter().zip(&worst).map(|(c, w)| c + (c - w)).collect();
        clamp_box(&mut reflected, lo, hi, 0.0);
        let fr = f(&reflected);

        if fr > fv[0] {
            let mut expanded: Vec<f64> =
                centroid.iter().zip(&worst).map(|(c, w)| c + 2.0 * (c - w)).collect();
            clamp_box(&mut expanded, lo, hi, 0.0);
            let fe = f(&expanded);
            if fe > fr {
                simplex[d] = expanded;
                fv[d] = fe;
            } else {
                simplex[d] = reflected;
                fv[d] = fr;
            }
        } else if fr > fsecond {
            simplex[d] = reflected;
            fv[d] = fr;
        } else {
            // Contraction (outside toward the reflected point if it improved
            // on the worst, inside toward the worst otherwise).
            let target = if fr > fworst { &reflected } else { &worst };
            let mut contracted: Vec<f64> =
                centroid.iter().zip(target).map(|(c, t)| c + 0.5 * (t - c)).collect();
            clamp_box(&mut contracted, lo, hi, 0.0);
            let fc = f(&contracted);
            if fc > fr.max(fworst) {
                simplex[d] = contracted;
                fv[d] = fc;
            } else {
                // Shrink every other vertex toward the best one.
                let best = simplex[0].clone();
                for (v, fvv) in simplex.iter_mut().zip(fv.iter_mut()).skip(1) {
                    for i in 0..d {
                        v[i] = best[i] + 0.5 * (v[i] - best[i]);
                    }
                    *fvv = f(v);
                }
            }
        }
    }

    // Return the best vertex seen (order the final simplex once more).
    let mut order: Vec<usize> = (0..=d).collect();
    order.sort_by(|&a, &b| fv[b].total_cmp(&fv[a]).then(a.cmp(&b)));
    NmOutcome { x: simplex[order[0]].clone(), f: fv[order[0]], iterations: iters, converged }
}

/// Projected-gradient ascent with Armijo backtracking. Returns the input when
/// it cannot improve.
fn polish_max<F: FnMut(&[f64]) -> f64, G: FnMut(&[f64]) -> Option<Vec<f64>>>(
    f: &mut F,
    grad: &mut G,
    x0: &[f64],
    f0: f64,
    lo: &[f64],
    hi: &[f64],
    iters: usize,
) -> (Vec<f64>, f64) {
    let mut x = x0.to_vec();
    let mut fx = f0;
    let width: f64 = lo
        .iter()
        .zip(hi)
        .map(|(l, h)| h - l)
        .fold(0.0_f64, f64::max);
    let mut step = 1e-2 * width.max(1e-12);
    for _ in 0..iters {
        let Some(g) = grad(&x) else { break };
        let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gnorm < 1e-14 {
            break;
        }
        let mut accepted = false;
        for _ in 0..40 {
            let mut cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi + step * gi).collect();
            clamp_box(&mut cand, lo, hi, 0.0);
            let dot: f64 =
                g.iter().zip(cand.iter().zip(&x)).map(|(gi, (c, xi))| gi * (c - xi)).sum();
            let fc = f(&cand);
            if fc >= fx + 1e-4 * dot && fc > fx {
                x = cand;
                fx = fc;
                step *= 1.5;
                accepted = true;
                break;
            }
            step *= 0.5;
            if step * gnorm < 1e-15 * (1.0 + fx.abs()) {
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    (x, fx)
}

/// Deterministic multistart points: the box center plus Halton points mapped
/// into the box with a 5% inset.
fn start_points(lo: &[f64], hi: &[f64], starts: usize) -> Vec<Vec<f64>> {
    let d = lo.len();
    let mut pts = Vec::with_capacity(starts.max(1));
    pts.push(lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect());
    for s in 1..starts.max(1) {
        let u = halton_point(s as u64, d);
        pts.push(
            (0..d)
                .map(|i| lo[i] + (0.05 + 0.9 * u[i]) * (hi[i] - lo[i]))
                .collect(),
        );
    }
    pts
}

struct BlockOutcome {
    x: Vec<f64>,
    f: f64,
    iterations: usize,
    runs: usize,
    converged: bool,
}

fn maximize_block<F: FnMut(&[f64]) -> f64, G: FnMut(&[f64]) -> Option<Vec<f64>>>(
    f: &mut F,
    grad: &mut G,
    lo: &[f64],
    hi: &[f64],
    opts: &OptimizerOptions,
) -> BlockOutcome {
    let starts = start_points(lo, hi, opts.starts);
    let mut best: Option<NmOutcome> = None;
    let mut iterations = 0usize;
    for s in &starts {
        let out = nelder_mead_max(f, s, lo, hi, opts.max_iters, opts.tol);
        iterations += out.iterations;
        let better = match &best {
            None => true,
            Some(b) => out.f > b.f,
        };
        if better {
            best = Some(out);
        }
    }
    let best = best.expect("at least one start");
    let (mut x, mut fx) = (best.x, best.f);
    let mut converged = best.converged;
    let mut runs = starts.len();
    if fx.is_finite() {
        // A single Nelder-Mead run can collapse slightly off the maximizer;
        // alternate gradient polish with fresh-simplex restarts until the
        // value stops improving.
        for _ in 0..3 {
            if opts.polish {
                let (px, pf) = polish_max(f, grad, &x, fx, lo, hi, opts.polish_iters);
                if pf > fx {
                    x = px;
                    fx = pf;
                }
            }
            let out = nelder_mead_max(f, &x, lo, hi, opts.max_iters, opts.tol);
            iterations += out.iterations;
            runs += 1;
            let improved = out.f > fx + 1e-13 * (1.0 + fx.abs());
            if out.f > fx {
                x = out.x;
                fx = out.f;
                converged = out.converged;
            } else if out.converged {
                converged = true;
            }
            if !improved {
                break;
            }
        }
    }
    clamp_box(&mut x, lo, hi, 1e-9);
    BlockOutcome { x, f: fx, iterations, runs, converged: converged && fx.is_finite() }
}

fn lambda_scale_for(mode: LambdaMode, n_jump: usize) -> Result<Option<f64>> {
    match mode {
        LambdaMode::Known(l) => {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::Config(format!(
                    "known lambda must be positive and finite, got {l}"
                )));
            }
            Ok(Some(l))
        }
        LambdaMode::Estimated => {
            if n_jump == 0 {
                Ok(None)
            } else {
                Ok(Some(n_jump as f64))
            }
        }
    }
}

/// Blockwise contrast maximization (continuous block, then jump block).
pub fn maximize_contrast(
    obs: &ObservationRecord,
    model: &ModelSpec,
    regime: &RegimeConfig,
    opts: &OptimizerOptions,
) -> Result<EstimationResult> {
    model.validate_domain(&opts.domain)?;
    let labels = classify_increments(obs, regime, model.density.support())?;
    maximize_with_labels(obs, model, &labels, opts)
}

/// Blockwise maximization against precomputed filter labels.
pub fn maximize_with_labels(
    obs: &ObservationRecord,
    model: &ModelSpec,
    labels: &FilterLabels,
    opts: &OptimizerOptions,
) -> Result<EstimationResult> {
    model.validate_domain(&opts.domain)?;
    let (d1, d2, d3) = model.dims();
    let lo = opts.domain.lower_flat();
    let hi = opts.domain.upper_flat();

    // Continuous block.
    let (lo_ms, hi_ms) = (&lo[..d1 + d2], &hi[..d1 + d2]);
    let mut f_ms = |x: &[f64]| {
        contrast_continuous(obs, &x[..d1], &x[d1..], labels, model)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let mut g_ms =
        |x: &[f64]| grad_continuous(obs, &x[..d1], &x[d1..], labels, model).ok();
    let ms = maximize_block(&mut f_ms, &mut g_ms, lo_ms, hi_ms, opts);
    if !ms.f.is_finite() {
        return Err(Error::Optimization(
            "continuous contrast is degenerate over the entire domain".into(),
        ));
    }

    // Jump block.
    let (lo_a, hi_a) = (&lo[d1 + d2..], &hi[d1 + d2..]);
    let scale = lambda_scale_for(opts.lambda_mode, labels.n_jump)?;
    let (alpha_hat, jump_value, jump_iters, jump_runs, jump_converged) = match scale {
        None => {
            // No jump-labeled increments: the jump contrast is identically
            // zero, so report the domain center without claiming convergence.
            let center: Vec<f64> =
                lo_a.iter().zip(hi_a).map(|(l, h)| 0.5 * (l + h)).collect();
            (center, 0.0, 0, 0, false)
        }
        Some(s) => {
            let mut f_a =
                |a: &[f64]| contrast_jump(obs, a, labels, model, s).unwrap_or(f64::NEG_INFINITY);
            let mut g_a = |a: &[f64]| grad_jump(obs, a, labels, model, s).ok();
            let out = maximize_block(&mut f_a, &mut g_a, lo_a, hi_a, opts);
            let conv = out.converged && labels.n_jump > 0;
            (out.x, out.f, out.iterations, out.runs, conv)
        }
    };
    debug_assert_eq!(alpha_hat.len(), d3);

    let theta_hat = ParameterPoint::new(
        ms.x[..d1].to_vec(),
        ms.x[d1..].to_vec(),
        alpha_hat,
    );
    Ok(EstimationResult {
        theta_hat,
        contrast_value: ms.f + jump_value,
        lambda_hat: labels.n_jump as f64,
        iterations: ms.iterations + jump_iters,
        restarts: (ms.runs - 1) + jump_runs.saturating_sub(1),
        converged: ms.converged && jump_converged,
        n_continuous: labels.n_continuous,
        n_jump: labels.n_jump,
    })
}

/// Joint maximization over the full parameter box (validation path).
pub fn maximize_contrast_joint(
    obs: &ObservationRecord,
    model: &ModelSpec,
    regime: &RegimeConfig,
    opts: &OptimizerOptions,
) -> Result<EstimationResult> {
    model.validate_domain(&opts.domain)?;
    let labels = classify_increments(obs, regime, model.density.support())?;
    let (d1, d2, d3) = model.dims();
    let lo = opts.domain.lower_flat();
    let hi = opts.domain.upper_flat();
    let scale = lambda_scale_for(opts.lambda_mode, labels.n_jump)?;

    let Some(s) = scale else {
        // Degenerate jump block: fall back to the blockwise path, which
        // handles it explicitly.
        return maximize_with_labels(obs, model, &labels, opts);
    };

    let mut f_all = |x: &[f64]| {
        let theta = ParameterPoint::new(
            x[..d1].to_vec(),
            x[d1..d1 + d2].to_vec(),
            x[d1 + d2..].to_vec(),
        );
        contrast_full(obs, &theta, &labels, model, s).unwrap_or(f64::NEG_INFINITY)
    };
    let mut g_all = |x: &[f64]| {
        let gc = grad_continuous(obs, &x[..d1], &x[d1..d1 + d2], &labels, model).ok()?;
        let gj = grad_jump(obs, &x[d1 + d2..], &labels, model, s).ok()?;
        let mut g = gc;
        g.extend(gj);
        Some(g)
    };
    let out = maximize_block(&mut f_all, &mut g_all, &lo, &hi, opts);
    if !out.f.is_finite() {
        return Err(Error::Optimization(
            "contrast is degenerate over the entire domain".into(),
        ));
    }
    let theta_hat = ParameterPoint::new(
        out.x[..d1].to_vec(),
        out.x[d1..d1 + d2].to_vec(),
        out.x[d1 + d2..].to_vec(),
    );
    debug_assert_eq!(theta_hat.alpha.len(), d3);
    Ok(EstimationResult {
        theta_hat,
        contrast_value: out.f,
        lambda_hat: labels.n_jump as f64,
        iterations: out.iterations,
        restarts: out.runs - 1,
        converged: out.converged && labels.n_jump > 0,
        n_continuous: labels.n_continuous,
        n_jump: labels.n_jump,
    })
}

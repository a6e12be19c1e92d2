//! Path simulation: the deterministic small-noise limit (RK4) and
//! Euler–Maruyama simulation of the jump diffusion with exact jump placement.
//!
//! The stochastic scheme is built for refinement studies: each observation
//! interval is backed by a master grid of `M = max(64, s)` fine Gaussian
//! increments, where `s` is the (power-of-two) number of Euler substeps.
//! A run with `s` substeps aggregates `M / s` consecutive fine increments per
//! substep, so runs with different substep counts but the same seed share the
//! same underlying Brownian path and converge pathwise as `s` grows. Jump
//! times and marks are drawn before any Gaussian noise, so the jump skeleton
//! is identical across refinements as well. Substep cells containing a jump
//! are integrated piecewise: fresh exact-variance Gaussian increments carry
//! the state to the jump time, the jump displacement `eps * c(x-, alpha) * v`
//! is applied, and the walk resumes.

use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelSpec, ParameterPoint, RegimeConfig, SupportKind};
use crate::numeric::rng::chacha_from_u64;

/// Solution of the noise-free limit ODE `dx = a(x, mu) dt` on `[0, 1]`.
#[derive(Clone, Debug)]
pub struct DeterministicPath {
    /// `steps` equidistant times from 0 to 1.
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl DeterministicPath {
    /// Value at time `t` by linear interpolation.
    pub fn at(&self, t: f64) -> f64 {
        let m = self.times.len();
        if t <= 0.0 {
            return self.values[0];
        }
        if t >= 1.0 {
            return self.values[m - 1];
        }
        let pos = t * (m - 1) as f64;
        let i = (pos.floor() as usize).min(m - 2);
        let w = pos - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }
}

/// Classical fourth-order Runge–Kutta solution of the limit ODE with
/// `steps >= 2` grid points (`steps - 1` equal steps on `[0, 1]`).
pub fn solve_limit_path(model: &ModelSpec, mu: &[f64], steps: usize) -> Result<DeterministicPath> {
    if steps < 2 {
        return Err(Error::Numerical("limit path needs at least 2 grid points".into()));
    }
    let h = 1.0 / (steps - 1) as f64;
    let mut times = Vec::with_capacity(steps);
    let mut values = Vec::with_capacity(steps);
    let mut x = model.x0;
    times.push(0.0);
    values.push(x);
    for i in 1..steps {
        let k1 = model.a(x, mu);
        let k2 = model.a(x + 0.5 * h * k1, mu);
        let k3 = model.a(x + 0.5 * h * k2, mu);
        let k4 = model.a(x + h * k3, mu);
        x += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        if !x.is_finite() {
            return Err(Error::Numerical(format!(
                "limit path diverged at t = {:.6}",
                i as f64 * h
            )));
        }
        times.push(i as f64 * h);
        values.push(x);
    }
    Ok(DeterministicPath { times, values })
}

/// Discrete observations of one simulated path.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObservationRecord {
    pub n: usize,
    pub epsilon: f64,
    /// `n + 1` times `k / n`.
    pub times: Vec<f64>,
    /// `n + 1` states `X_{k/n}`.
    pub values: Vec<f64>,
}

impl ObservationRecord {
    /// Increment over the `k`-th interval, `k` in `0..n`.
    pub fn increment(&self, k: usize) -> f64 {
        self.values[k + 1] - self.values[k]
    }

    /// Left endpoint state of the `k`-th interval.
    pub fn left(&self, k: usize) -> f64 {
        self.values[k]
    }
}

/// One jump of the driving compound Poisson process.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JumpEvent {
    pub time: f64,
    pub mark: f64,
    /// Zero-based index of the observation increment containing the jump.
    pub interval: usize,
}

/// Ground truth retained from a simulation.
#[derive(Clone, Debug)]
pub struct SimulatedTruth {
    pub jumps: Vec<JumpEvent>,
    pub jump_count: usize,
    pub warnings: Vec<String>,
    /// Per observation interval, the Brownian increments applied on each
    /// Euler substep (only retained on request).
    pub wiener: Option<Vec<Vec<f64>>>,
}

/// Simulates one path observed at `t_k = k/n` (noise not retained).
pub fn simulate_path(
    model: &ModelSpec,
    theta0: &ParameterPoint,
    regime: &RegimeConfig,
    substeps: usize,
) -> Result<(ObservationRecord, SimulatedTruth)> {
    simulate_path_opts(model, theta0, regime, substeps, false)
}

/// Simulates one path, optionally retaining the applied Brownian increments.
pub fn simulate_path_opts(
    model: &ModelSpec,
    theta0: &ParameterPoint,
    regime: &RegimeConfig,
    substeps: usize,
    retain_noise: bool,
) -> Result<(ObservationRecord, SimulatedTruth)> {
    regime.validate()?;
    model.validate_theta(theta0)?;
    if substeps == 0 {
        return Err(Error::Simulation("substeps must be positive".into()));
    }
    let n = regime.n;
    let eps = regime.epsilon;
    let s_eff = substeps.next_power_of_two();
    let master = s_eff.max(64);
    let agg = master / s_eff;
    let dt_fine = 1.0 / (n as f64 * master as f64);
    let dt_cell = 1.0 / (n as f64 * s_eff as f64);

    let mut rng = chacha_from_u64(regime.seed);

    // Phase 1: the jump skeleton, before any Gaussian noise, so it is
    // invariant under substep refinement.
    let mut jump_times: Vec<f64> = Vec::new();
    if regime.lambda > 0.0 {
        let exp = Exp::new(regime.lambda)
            .map_err(|e| Error::Simulation(format!("invalid jump intensity: {e}")))?;
        let mut t = 0.0;
        loop {
            t += exp.sample(&mut rng);
            if t >= 1.0 {
                break;
            }
            jump_times.push(t);
        }
    }
    let marks: Vec<f64> = jump_times
        .iter()
        .map(|_| model.density.sample(&theta0.alpha, &mut rng))
        .collect();
    let jumps: Vec<JumpEvent> = jump_times
        .iter()
        .zip(&marks)
        .map(|(&time, &mark)| JumpEvent {
            time,
            mark,
            interval: ((time * n as f64).ceil() as usize).clamp(1, n) - 1,
        })
        .collect();

    // Phase 2: Euler–Maruyama walk over the master Gaussian grid.
    let mut x = model.x0;
    let mut values = Vec::with_capacity(n + 1);
    values.push(x);
    let mut warnings: Vec<String> = Vec::new();
    let mut min_abs_b = f64::INFINITY;
    let mut jump_coeff_warned = false;
    let mut wiener = if retain_noise { Some(Vec::with_capacity(n)) } else { None };
    let mut z_buf = vec![0.0_f64; if eps > 0.0 { master } else { 0 }];
    let mut jump_ptr = 0usize;

    for k in 0..n {
        if eps > 0.0 {
            for z in z_buf.iter_mut() {
                *z = rng.sample::<f64, _>(StandardNormal);
            }
        }
        let mut interval_noise = if retain_noise { Some(Vec::with_capacity(s_eff)) } else { None };
        let t_left = k as f64 / n as f64;
        for cell in 0..s_eff {
            let cell_start = t_left + cell as f64 * dt_cell;
            let cell_end = t_left + (cell + 1) as f64 * dt_cell;
            // Jumps falling in this cell (jump times are sorted).
            let first = jump_ptr;
            while jump_ptr < jumps.len() && jumps[jump_ptr].time < cell_end {
                jump_ptr += 1;
            }
            let cell_jumps = &jumps[first..jump_ptr];
            let mut applied_noise = 0.0;
            if cell_jumps.is_empty() {
                let dw = if eps > 0.0 {
                    let sum: f64 = z_buf[cell * agg..(cell + 1) * agg].iter().sum();
                    dt_fine.sqrt() * sum
                } else {
                    0.0
                };
                let b = model.b(x, &theta0.sigma);
                min_abs_b = min_abs_b.min(b.abs());
                x += model.a(x, &theta0.mu) * dt_cell + eps * b * dw;
                applied_noise = dw;
            } else {
                // Piecewise walk with fresh exact-variance increments.
                let mut cur = cell_start;
                for j in cell_jumps {
                    let dt = j.time - cur;
                    if dt > 0.0 && eps > 0.0 {
                        let z: f64 = rng.sample(StandardNormal);
                        let dw = dt.sqrt() * z;
                        let b = model.b(x, &theta0.sigma);
                        min_abs_b = min_abs_b.min(b.abs());
                        x += model.a(x, &theta0.mu) * dt + eps * b * dw;
                        applied_noise += dw;
                    } else if dt > 0.0 {
                        x += model.a(x, &theta0.mu) * dt;
                    }
                    let c = model.c(x, &theta0.alpha);
                    if !jump_coeff_warned
                        && (c.abs() < 1e-10
                            || (model.density.support() == SupportKind::PositiveHalfLine
                                && c <= 0.0))
                    {
                        warnings.push(format!(
                            "jump coefficient c = {c:e} at jump time {:.6} undermines \
                             threshold classification",
                            j.time
                        ));
                        jump_coeff_warned = true;
                    }
                    x += eps * c * j.mark;
                    cur = j.time;
                }
                let dt = cell_end - cur;
                if dt > 0.0 && eps > 0.0 {
                    let z: f64 = rng.sample(StandardNormal);
                    let dw = dt.sqrt() * z;
                    let b = model.b(x, &theta0.sigma);
                    min_abs_b = min_abs_b.min(b.abs());
                    x += model.a(x, &theta0.mu) * dt + eps * b * dw;
                    applied_noise += dw;
                } else if dt > 0.0 {
                    x += model.a(x, &theta0.mu) * dt;
                }
            }
            if let Some(v) = interval_noise.as_mut() {
                v.push(applied_noise);
            }
            if !x.is_finite() || x.abs() > 1e12 {
                return Err(Error::Simulation(format!(
                    "path exploded (x = {x:e}) near t = {cell_end:.6}"
                )));
            }
        }
        values.push(x);
        if let (Some(w), Some(v)) = (wiener.as_mut(), interval_noise) {
            w.push(v);
        }
    }

    if min_abs_b < 1e-6 && eps > 0.0 {
        warnings.push(format!(
            "diffusion coefficient nearly degenerate along the path (min |b| = {min_abs_b:e})"
        ));
    }

    let times = (0..=n).map(|k| k as f64 / n as f64).collect();
    let jump_count = jumps.len();
    Ok((
        ObservationRecord { n, epsilon: eps, times, values },
        SimulatedTruth { jumps, jump_count, warnings, wiener },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin;
    use crate::model::{
        DensityKind, DiffusionSpec, DriftSpec, JumpCoeffSpec, JumpDensityFamily,
    };
    use crate::numeric::rng::derive_child;
    use approx::assert_relative_eq;

    fn regime(n: usize, epsilon: f64, lambda: f64, seed: u64) -> RegimeConfig {
        RegimeConfig { n, epsilon, lambda, rho: 0.2, v: 1.0, seed }
    }

    #[test]
    fn limit_path_matches_exponential_decay() {
        let b = builtin("ou-gamma").unwrap();
        let path = solve_limit_path(&b.model, &[1.0], 1000).unwrap();
        for (i, &t) in path.times.iter().enumerate() {
            assert!((path.values[i] - (-t).exp()).abs() < 1e-10, "t = {t}");
        }
        assert_relative_eq!(path.at(0.5), 0.5_f64.exp().recip(), max_relative = 1e-6);
    }

    #[test]
    fn limit_path_handles_flat_and_constant_drift() {
        let mut m = builtin("ou-gamma").unwrap().model;
        m.drift = DriftSpec::Constant;
        m.x0 = 0.0;
        let path = solve_limit_path(&m, &[2.0], 100).unwrap();
        assert_relative_eq!(*path.values.last().unwrap(), 2.0, max_relative = 1e-14);
        m.x0 = 0.7;
        let path = solve_limit_path(&m, &[0.0], 50).unwrap();
        assert!(path.values.iter().all(|&v| v == 0.7));
    }

    #[test]
    fn simulation_is_deterministic_in_the_seed() {
        let b = builtin("ou-gamma").unwrap();
        let r = regime(200, 0.02, 8.0, 42);
        let (o1, t1) = simulate_path(&b.model, &b.theta0, &r, 8).unwrap();
        let (o2, t2) = simulate_path(&b.model, &b.theta0, &r, 8).unwrap();
        assert_eq!(o1.values, o2.values);
        assert_eq!(t1.jump_count, t2.jump_count);
        for (a, bb) in t1.jumps.iter().zip(&t2.jumps) {
            assert_eq!(a.time, bb.time);
            assert_eq!(a.mark, bb.mark);
            assert_eq!(a.interval, bb.interval);
        }
        let r2 = regime(200, 0.02, 8.0, 43);
        let (o3, _) = simulate_path(&b.model, &b.theta0, &r2, 8).unwrap();
        assert_ne!(o1.values, o3.values);
    }

    #[test]
    fn zero_intensity_gives_no_jumps() {
        let b = builtin("ou-gamma").unwrap();
        let (_, truth) = simulate_path(&b.model, &b.theta0, &regime(100, 0.01, 0.0, 7), 4).unwrap();
        assert_eq!(truth.jump_count, 0);
        assert!(truth.jumps.is_empty());
    }

    #[test]
    fn zero_noise_recovers_the_limit_ode() {
        let b = builtin("ou-gamma").unwrap();
        let r = regime(500, 0.0, 0.0, 3);
        let (obs, _) = simulate_path(&b.model, &b.theta0, &r, 16).unwrap();
        let lim = solve_limit_path(&b.model, &b.theta0.mu, 2001).unwrap();
        let max_dev = obs
            .times
            .iter()
            .zip(&obs.values)
            .map(|(&t, &x)| (x - lim.at(t)).abs())
            .fold(0.0_f64, f64::max);
        // Euler drift error at dt = 1/8000 on the OU drift.
        assert!(max_dev < 5e-4, "max deviation {max_dev}");
    }

    #[test]
    fn zero_noise_keeps_jumps_invisible() {
        // With eps = 0 the jump displacement eps * c * v vanishes: the path
        // is the ODE even though jumps occurred.
        let b = builtin("ou-gamma").unwrap();
        let r = regime(100, 0.0, 20.0, 11);
        let (obs, truth) = simulate_path(&b.model, &b.theta0, &r, 4).unwrap();
        assert!(truth.jump_count > 0);
        let lim = solve_limit_path(&b.model, &b.theta0.mu, 2001).unwrap();
        let dev = (obs.values[100] - lim.at(1.0)).abs();
        assert!(dev < 5e-3, "deviation {dev}");
    }

    #[test]
    fn jump_counts_follow_the_poisson_law() {
        let b = builtin("ou-gamma").unwrap();
        let lambda = 3.0;
        let reps = 10_000;
        let mut total = 0usize;
        for i in 0..reps {
            let seed = derive_child(999, 1, i as u64);
            let r = regime(16, 0.0, lambda, seed);
            let (_, truth) = simulate_path(&b.model, &b.theta0, &r, 1).unwrap();
            total += truth.jump_count;
        }
        let mean = total as f64 / reps as f64;
        let se = (lambda / reps as f64).sqrt();
        assert!(
            (mean - lambda).abs() < 3.0 * se,
            "mean jump count {mean} vs {lambda} (se {se})"
        );
    }

    #[test]
    fn jump_intervals_are_binned_correctly() {
        let b = builtin("ou-gamma").unwrap();
        let r = regime(50, 0.01, 25.0, 5);
        let (_, truth) = simulate_path(&b.model, &b.theta0, &r, 4).unwrap();
        assert!(truth.jump_count > 0);
        for j in &truth.jumps {
            assert!(j.interval < 50);
            let lo = j.interval as f64 / 50.0;
            let hi = (j.interval + 1) as f64 / 50.0;
            assert!(j.time > lo && j.time <= hi, "time {} not in ({lo}, {hi}]", j.time);
        }
    }

    /// Runs with coarser and finer substeps share the master Brownian path,
    /// so halving the step size roughly halves the pathwise gap (strong
    /// order 1 for additive noise).
    #[test]
    fn substep_refinement_converges_pathwise() {
        let b = builtin("ou-gamma").unwrap();
        let mut gap48 = 0.0;
        let mut gap816 = 0.0;
        let reps = 40;
        for i in 0..reps {
            let r = regime(50, 0.1, 0.0, derive_child(31337, 2, i));
            let (o4, _) = simulate_path(&b.model, &b.theta0, &r, 4).unwrap();
            let (o8, _) = simulate_path(&b.model, &b.theta0, &r, 8).unwrap();
            let (o16, _) = simulate_path(&b.model, &b.theta0, &r, 16).unwrap();
            for k in 0..=50 {
                gap48 += (o4.values[k] - o8.values[k]).powi(2);
                gap816 += (o8.values[k] - o16.values[k]).powi(2);
            }
        }
        let ratio = (gap48 / gap816).sqrt();
        assert!(
            (1.3..=2.8).contains(&ratio),
            "refinement RMS ratio {ratio} outside [1.3, 2.8]"
        );
    }

    /// As the noise scale shrinks, the observed path tracks the limit ODE
    /// uniformly better (in L2 of the sup deviation).
    #[test]
    fn small_noise_limit_tightens_along_a_ladder() {
        let b = builtin("ou-gamma").unwrap();
        let lim = solve_limit_path(&b.model, &b.theta0.mu, 4001).unwrap();
        let mut sup_l2 = Vec::new();
        for (rung, eps) in [0.02, 0.01, 0.005].into_iter().enumerate() {
            let mut acc = 0.0;
            let reps = 30;
            for i in 0..reps {
                let r = regime(1000, eps, 10.0, derive_child(777, rung as u64, i));
                let (obs, _) = simulate_path(&b.model, &b.theta0, &r, 4).unwrap();
                let sup = obs
                    .times
                    .iter()
                    .zip(&obs.values)
                    .map(|(&t, &x)| (x - lim.at(t)).abs())
                    .fold(0.0_f64, f64::max);
                acc += sup * sup;
            }
            sup_l2.push((acc / reps as f64).sqrt());
        }
        assert!(
            sup_l2[0] > sup_l2[1] && sup_l2[1] > sup_l2[2],
            "sup-deviation L2 not decreasing: {sup_l2:?}"
        );
    }

    #[test]
    fn explosion_is_reported() {
        // A strongly unstable drift: dx = mu1 * (mu2 - x) with negative mu1
        // pushes x away from mu2 exponentially; with a huge rate it explodes.
        let m = ModelSpec {
            drift: DriftSpec::MeanReversion,
            diffusion: DiffusionSpec::Constant,
            jump: JumpCoeffSpec::Const { value: 1.0 },
            density: JumpDensityFamily::new(DensityKind::Normal),
            x0: 1.0,
        };
        let theta = ParameterPoint::new(vec![-80.0, 0.0], vec![1.0], vec![0.0, 1.0]);
        let r = regime(20, 0.01, 0.0, 1);
        let err = simulate_path(&m, &theta, &r, 64).unwrap_err();
        assert_eq!(err.kind(), "simulation");
    }

    #[test]
    fn retained_noise_has_matching_shape() {
        let b = builtin("ou-gamma").unwrap();
        let r = regime(30, 0.05, 5.0, 9);
        let (_, truth) = simulate_path_opts(&b.model, &b.theta0, &r, 8, true).unwrap();
        let w = truth.wiener.unwrap();
        assert_eq!(w.len(), 30);
        assert!(w.iter().all(|v| v.len() == 8));
    }
}

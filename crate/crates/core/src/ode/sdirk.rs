//! L-stable SDIRK 4(3) with simplified Newton iteration.
//!
//! Five stages, all with diagonal coefficient `γ = 1/4`, so one LU
//! factorization of `I − hγJ` serves the whole step. The Jacobian comes from
//! internal finite differences and is reused across steps until Newton
//! convergence degrades; the LU is refactored when the step size drifts by
//! more than 20% or the Jacobian is refreshed. The embedded third-order error
//! estimate is filtered through `(I − hγJ)⁻¹` to keep it bounded on stiff
//! components.

use crate::error::OdeError;
use crate::linalg::{Lu, Matrix};
use crate::scalar::Scalar;

use super::{error_norm, initial_step, step_factor, OdeProblem, SolverSettings, StepMode, Trajectory};

const STAGES: usize = 5;
const GAMMA: f64 = 0.25;
const C: [f64; STAGES] = [0.25, 0.75, 11.0 / 20.0, 0.5, 1.0];
const A: [[f64; STAGES]; STAGES] = [
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [0.5, 0.25, 0.0, 0.0, 0.0],
    [17.0 / 50.0, -1.0 / 25.0, 0.25, 0.0, 0.0],
    [371.0 / 1360.0, -137.0 / 2720.0, 15.0 / 544.0, 0.25, 0.0],
    [25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0, 0.25],
];
/// `b − b̂`: weights of the embedded error estimate.
const D: [f64; STAGES] = [-3.0 / 16.0, -27.0 / 32.0, 25.0 / 32.0, 0.0, 0.25];
/// Error-estimate order + 1 (controller exponent).
const ERROR_ORDER: u32 = 4;

const MAX_NEWTON_ITERS: usize = 10;
const NEWTON_TOL: f64 = 1e-2;
/// Iteration count above which the Jacobian is considered stale.
const SLOW_NEWTON_ITERS: usize = 4;
/// Relative step-size drift that forces an LU refactorization.
const H_DRIFT_LIMIT: f64 = 0.2;

struct Workspace<R> {
    k: Vec<Vec<R>>,
    known: Vec<R>,
    stage_y: Vec<R>,
    f_val: Vec<R>,
    resid: Vec<R>,
    err: Vec<R>,
    jac: Matrix<R>,
    f0: Vec<R>,
    y_pert: Vec<R>,
    f_pert: Vec<R>,
}

enum StageSweep {
    Converged { max_iters: usize },
    Failed,
}

pub(super) fn integrate<R, F>(
    problem: &OdeProblem<R, F>,
    settings: &SolverSettings<R>,
) -> Result<Trajectory<R>, OdeError>
where
    R: Scalar,
    F: Fn(R, &[R], &mut [R]) + Sync,
{
    let dim = problem.dim;
    let (t0, t_end) = problem.t_span;
    let gamma = R::cast(GAMMA);
    let c: Vec<R> = C.iter().map(|&v| R::cast(v)).collect();
    let a: Vec<Vec<R>> = A.iter().map(|row| row.iter().map(|&v| R::cast(v)).collect()).collect();
    let d: Vec<R> = D.iter().map(|&v| R::cast(v)).collect();

    let mut rhs_evals = 0usize;
    let eval = |t: R, y: &[R], out: &mut [R], count: &mut usize| -> Result<(), OdeError> {
        (problem.rhs)(t, y, out);
        *count += 1;
        if out.iter().any(|v| !v.is_finite()) {
            return Err(OdeError::NonFiniteDerivative { t: t.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(())
    };

    let mut ws = Workspace {
        k: vec![vec![R::zero(); dim]; STAGES],
        known: vec![R::zero(); dim],
        stage_y: vec![R::zero(); dim],
        f_val: vec![R::zero(); dim],
        resid: vec![R::zero(); dim],
        err: vec![R::zero(); dim],
        jac: Matrix::zeros(dim, dim),
        f0: vec![R::zero(); dim],
        y_pert: vec![R::zero(); dim],
        f_pert: vec![R::zero(); dim],
    };

    let mut t = t0;
    let mut y = problem.y0.clone();
    eval(t, &y, &mut ws.f0, &mut rhs_evals)?;

    let fixed = matches!(settings.step, StepMode::Fixed(_));
    let mut h = match settings.step {
        StepMode::Fixed(h) => h,
        StepMode::Adaptive => settings
            .h_init
            .unwrap_or_else(|| initial_step(problem, &ws.f0, ERROR_ORDER)),
    };
    if let Some(h_max) = settings.h_max {
        h = h.min(h_max);
    }

    let mut trajectory = Trajectory {
        times: vec![t],
        states: vec![y.clone()],
        derivs: vec![ws.f0.clone()],
        accepted_steps: 0,
        rejected_steps: 0,
        rhs_evals: 0,
    };

    let mut lu: Option<Lu<R>> = None;
    let mut h_factored = R::zero();
    let mut jac_valid = false;
    let mut jac_fresh = false;
    let mut want_fresh_jac = true;
    // Whether ws.jac was evaluated at the current (t, y).
    let mut jac_is_current = false;

    let mut after_reject = false;
    let mut steps = 0usize;
    while t < t_end {
        steps += 1;
        if steps > settings.max_steps {
            return Err(OdeError::MaxStepsExceeded {
                max_steps: settings.max_steps,
                t: t.to_f64().unwrap_or(f64::NAN),
            });
        }
        let span_left = t_end - t;
        let h_floor = R::cast(16.0) * R::epsilon() * t.abs().max(R::one());
        if span_left <= h_floor {
            break; // remaining span is roundoff residue
        }
        if h > span_left {
            h = span_left;
        }
        if h < h_floor {
            return Err(OdeError::StepSizeUnderflow { t: t.to_f64().unwrap_or(f64::NAN) });
        }

        if want_fresh_jac || !jac_valid {
            finite_difference_jacobian(problem, t, &y, &mut ws, &mut rhs_evals)?;
            jac_valid = true;
            jac_fresh = true;
            jac_is_current = true;
            want_fresh_jac = false;
        }
        let drift = ((h - h_factored) / h_factored).abs();
        if lu.is_none() || jac_fresh || !(drift <= R::cast(H_DRIFT_LIMIT)) {
            let mut iteration = Matrix::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    iteration[(i, j)] = -h * gamma * ws.jac[(i, j)];
                }
                iteration[(i, i)] += R::one();
            }
            match Lu::factor(iteration) {
                Ok(factored) => {
                    lu = Some(factored);
                    h_factored = h;
                }
                Err(_) => {
                    h = h / R::cast(2.0);
                    lu = None;
                    trajectory.rejected_steps += 1;
                    after_reject = true;
                    continue;
                }
            }
            jac_fresh = false;
        }
        let lu_ref = lu.as_ref().expect("factored above");

        match stage_sweep(problem, &eval, &mut ws, lu_ref, &y, t, h, &c, &a, gamma, fixed, &mut rhs_evals)? {
            StageSweep::Converged { max_iters } => {
                if max_iters > SLOW_NEWTON_ITERS {
                    want_fresh_jac = true;
                }
            }
            StageSweep::Failed => {
                if !jac_is_current {
                    // Retry at the same step size with a fresh Jacobian first.
                    want_fresh_jac = true;
                } else if fixed {
                    return Err(OdeError::NewtonFailure { t: t.to_f64().unwrap_or(f64::NAN) });
                } else {
                    h = h / R::cast(2.0);
                    trajectory.rejected_steps += 1;
                    after_reject = true;
                }
                continue;
            }
        }

        // Candidate solution (stiffly accurate: b row equals the last A row).
        for i in 0..dim {
            let mut acc = y[i];
            for (s, ks) in ws.k.iter().enumerate() {
                acc += h * a[STAGES - 1][s] * ks[i];
            }
            ws.stage_y[i] = acc;
        }

        // Filtered embedded error estimate.
        for i in 0..dim {
            let mut acc = R::zero();
            for (s, ks) in ws.k.iter().enumerate() {
                acc += d[s] * ks[i];
            }
            ws.err[i] = h * acc;
        }
        lu_ref.solve_in_place(&mut ws.err);
        let err = error_norm(&ws.err, &y, &ws.stage_y, problem.rtol, problem.atol);

        if fixed || err <= R::one() {
            t = t + h;
            y.copy_from_slice(&ws.stage_y);
            trajectory.accepted_steps += 1;
            trajectory.times.push(t);
            trajectory.states.push(y.clone());
            // c_last = 1, so the final stage derivative is f(t + h, y_new);
            // it doubles as f(t, y) of the next step.
            trajectory.derivs.push(ws.k[STAGES - 1].clone());
            ws.f0.copy_from_slice(&ws.k[STAGES - 1]);
            jac_is_current = false;
            if !fixed {
                h = h * step_factor(err, ERROR_ORDER, after_reject);
                if let Some(h_max) = settings.h_max {
                    h = h.min(h_max);
                }
            }
            after_reject = false;
        } else {
            trajectory.rejected_steps += 1;
            h = h * step_factor(err, ERROR_ORDER, true);
            after_reject = true;
        }
    }

    trajectory.rhs_evals = rhs_evals;
    Ok(trajectory)
}

/// Solves all five stage equations by simplified Newton, reusing one LU.
#[allow(clippy::too_many_arguments)]
fn stage_sweep<R, F, E>(
    problem: &OdeProblem<R, F>,
    eval: &E,
    ws: &mut Workspace<R>,
    lu: &Lu<R>,
    y: &[R],
    t: R,
    h: R,
    c: &[R],
    a: &[Vec<R>],
    gamma: R,
    fixed: bool,
    rhs_evals: &mut usize,
) -> Result<StageSweep, OdeError>
where
    R: Scalar,
    F: Fn(R, &[R], &mut [R]) + Sync,
    E: Fn(R, &[R], &mut [R], &mut usize) -> Result<(), OdeError>,
{
    let dim = problem.dim;
    let newton_tol = if fixed { R::cast(NEWTON_TOL * 1e-4) } else { R::cast(NEWTON_TOL) };
    let mut max_iters = 0usize;
    for s in 0..STAGES {
        for i in 0..dim {
            let mut acc = y[i];
            for (j, kj) in ws.k.iter().enumerate().take(s) {
                acc += h * a[s][j] * kj[i];
            }
            ws.known[i] = acc;
        }
        // Warm start: previous stage derivative (or f(t, y) foratge 0).
        let init: Vec<R> = if s == 0 { ws.f0.clone() } else { ws.k[s - 1].clone() };
        ws.k[s].copy_from_slice(&init);
        if std::env::var("SDIRK_DEBUG2").is_ok() && t.to_f64().unwrap() > 6.5 && t.to_f64().unwrap() < 6.8 && s == 0 {
            eprintln!("  t={:.4} s=0 y={:?} known={:?} f0={:?}",
                t.to_f64().unwrap(),
                y.iter().map(|v| v.to_f64().unwrap()).collect::<Vec<_>>(),
                ws.known.iter().map(|v| v.to_f64().unwrap()).collect::<Vec<_>>(),
                ws.f0.iter().map(|v| v.to_f64().unwrap()).collect::<Vec<_>>());
        }

        let t_stage = t + c[s] * h;
        let mut converged = false;
        let mut last_norm = R::infinity();
        for iter in 1..=MAX_NEWTON_ITERS {
            for i in 0..dim {
                ws.stage_y[i] = ws.known[i] + h * gamma * ws.k[s][i];
            }
            eval(t_stage, &ws.stage_y, &mut ws.f_val, rhs_evals)?;
            for i in 0..dim {
                ws.resid[i] = ws.f_val[i] - ws.k[s][i];
            }
            lu.solve_in_place(&mut ws.resid);
            let mut norm = R::zero();
            for i in 0..dim {
                ws.k[s][i] += ws.resid[i];
                let w = problem.atol + problem.rtol * ws.stage_y[i].abs();
                let scaled = ws.resid[i] * (h * gamma) / w;
                norm += scaled * scaled;
            }
            norm = (norm / R::from_usize(dim).unwrap()).sqrt();
            if norm <= newton_tol {
                converged = true;
                max_iters = max_iters.max(iter);
                break;
            }
            if norm > last_norm * R::cast(2.0) && norm > R::one() {
                break; // diverging
            }
            last_norm = norm;
        }
        if !converged {
            return Ok(StageSweep::Failed);
        }
    }
    Ok(StageSweep::Converged { max_iters })
}

/// Dense finite-difference Jacobian at `(t, y)`, overwriting `ws.jac`.
///
/// The base value is re-evaluated here rather than taken from a cached
/// derivative: divided differences amplify any inconsistency in the base by
/// `1/δ`, so it must come from the same arithmetic as the perturbed calls.
/// Perturbations are floored at a fraction of the state norm so near-zero
/// coordinates do not collapse `δ` to roundoff size.
fn finite_difference_jacobian<R, F>(
    problem: &OdeProblem<R, F>,
    t: R,
    y: &[R],
    ws: &mut Workspace<R>,
    rhs_evals: &mut usize,
) -> Result<(), OdeError>
where
    R: Scalar,
    F: Fn(R, &[R], &mut [R]) + Sync,
{
    let dim = problem.dim;
    let sqrt_eps = R::epsilon().sqrt();
    let norm_inf = y.iter().fold(R::zero(), |acc, v| acc.max(v.abs()));
    let scale = if norm_inf > R::zero() { R::cast(0.01) * norm_inf } else { R::one() };
    (problem.rhs)(t, y, &mut ws.f_val);
    *rhs_evals += 1;
    ws.y_pert.copy_from_slice(y);
    for j in 0..dim {
        let delta = sqrt_eps * y[j].abs().max(scale);
        let saved = ws.y_pert[j];
        ws.y_pert[j] = saved + delta;
        let actual = ws.y_pert[j] - saved;
        (problem.rhs)(t, &ws.y_pert, &mut ws.f_pert);
        *rhs_evals += 1;
        for i in 0..dim {
            let dfi = ws.f_pert[i] - ws.f_val[i];
            if !dfi.is_finite() {
                return Err(OdeError::NonFiniteDerivative { t: t.to_f64().unwrap_or(f64::NAN) });
            }
            ws.jac[(i, j)] = dfi / actual;
        }
        ws.y_pert[j] = saved;
    }
    Ok(())
}

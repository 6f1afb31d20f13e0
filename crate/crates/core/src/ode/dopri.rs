//! Explicit Dormand–Prince 5(4) with FSAL, the non-stiff fallback method.

use crate::error::OdeError;
use crate::scalar::Scalar;

use super::{error_norm, initial_step, step_factor, OdeProblem, SolverSettings, StepMode, Trajectory};

const STAGES: usize = 7;
const C: [f64; STAGES] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; STAGES] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// `b − b̂`: weights of the embedded fourth-order error estimate.
const E: [f64; STAGES] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const ERROR_ORDER: u32 = 5;

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
    let c: Vec<R> = C.iter().map(|&v| R::cast(v)).collect();
    let a: Vec<Vec<R>> = A.iter().map(|row| row.iter().map(|&v| R::cast(v)).collect()).collect();
    let e: Vec<R> = E.iter().map(|&v| R::cast(v)).collect();

    let mut rhs_evals = 0usize;
    let eval = |t: R, y: &[R], out: &mut [R], count: &mut usize| -> Result<(), OdeError> {
        (problem.rhs)(t, y, out);
        *count += 1;
        if out.iter().any(|v| !v.is_finite()) {
            return Err(OdeError::NonFiniteDerivative { t: t.to_f64().unwrap_or(f64::NAN) });
        }
        Ok(())
    };

    let mut t = t0;
    let mut y = problem.y0.clone();
    let mut k: Vec<Vec<R>> = vec![vec![R::zero(); dim]; STAGES];
    let mut stage_y = vec![R::zero(); dim];
    let mut y_new = vec![R::zero(); dim];
    let mut err_vec = vec![R::zero(); dim];

    eval(t, &y, &mut k[0], &mut rhs_evals)?;

    let fixed = matches!(settings.step, StepMode::Fixed(_));
    let mut h = match settings.step {
        StepMode::Fixed(h) => h,
        StepMode::Adaptive => settings
            .h_init
            .unwrap_or_else(|| initial_step(problem, &k[0], ERROR_ORDER)),
    };
    if let Some(h_max) = settings.h_max {
        h = h.min(h_max);
    }

    let mut trajectory = Trajectory {
        times: vec![t],
        states: vec![y.clone()],
        derivs: vec![k[0].clone()],
        accepted_steps: 0,
        rejected_steps: 0,
        rhs_evals: 0,
    };

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

        for s in 1..STAGES {
            for i in 0..dim {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * a[s][j] * kj[i];
                }
                stage_y[i] = acc;
            }
            if s == STAGES - 1 {
                y_new.copy_from_slice(&stage_y);
            }
            let (head, tail) = k.split_at_mut(s);
            let _ = head;
            eval(t + c[s] * h, &stage_y, &mut tail[0], &mut rhs_evals)?;
        }

        for i in 0..dim {
            let mut acc = R::zero();
            for (s, ks) in k.iter().enumerate() {
                acc += e[s] * ks[i];
            }
            err_vec[i] = h * acc;
        }
        let err = error_norm(&err_vec, &y, &y_new, problem.rtol, problem.atol);

        if fixed || err <= R::one() {
            t = t + h;
            y.copy_from_slice(&y_new);
            // FSAL: the last stage derivative is f(t + h, y_new).
            let last = k[STAGES - 1].clone();
            k[0].copy_from_slice(&last);
            trajectory.accepted_steps += 1;
            trajectory.times.push(t);
            trajectory.states.push(y.clone());
            trajectory.derivs.push(last);
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

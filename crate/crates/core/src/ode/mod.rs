//! Adaptive ODE integration with dense output and integral augmentation.
//!
//! The primary method is an L-stable SDIRK of order 4(3) suitable for the
//! mildly stiff PBPK right-hand sides; an explicit Dormand–Prince 5(4) pair
//! is available as a fallback for non-stiff work. Integrals of observables
//! (AUC) ride along as augmented states so the step controller bounds their
//! error directly.

mod dopri;
mod sdirk;

use crate::error::OdeError;
use crate::scalar::{two, Scalar};

/// An initial value problem `y' = f(t, y)`, `y(t0) = y0`.
///
/// The right-hand side must be deterministic and side-effect free.
pub struct OdeProblem<R, F> {
    pub dim: usize,
    pub rhs: F,
    pub y0: Vec<R>,
    pub t_span: (R, R),
    /// Relative tolerance, accepted range `[1e-10, 1e-3]`.
    pub rtol: R,
    /// Absolute tolerance in state units.
    pub atol: R,
}

/// Integration method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// L-stable singly-diagonally-implicit Runge–Kutta 4(3).
    #[default]
    Sdirk,
    /// Explicit Dormand–Prince 5(4).
    DormandPrince,
}

/// Adaptive error control or a fixed step (used by convergence studies).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode<R> {
    Adaptive,
    Fixed(R),
}

#[derive(Debug, Clone, Copy)]
pub struct SolverSettings<R> {
    pub method: Method,
    pub step: StepMode<R>,
    pub max_steps: usize,
    pub h_init: Option<R>,
    pub h_max: Option<R>,
}

impl<R: Scalar> Default for SolverSettings<R> {
    fn default() -> Self {
        Self {
            method: Method::Sdirk,
            step: StepMode::Adaptive,
            max_steps: 1_000_000,
            h_init: None,
            h_max: None,
        }
    }
}

/// Accepted-step trajectory with the derivative at each point, which makes
/// cubic Hermite interpolation available for dense sampling.
#[derive(Debug, Clone)]
pub struct Trajectory<R> {
    pub times: Vec<R>,
    pub states: Vec<Vec<R>>,
    pub derivs: Vec<Vec<R>>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub rhs_evals: usize,
}

impl<R: Scalar> Trajectory<R> {
    pub fn final_state(&self) -> &[R] {
        self.states.last().expect("trajectory has at least the initial point")
    }

    pub fn final_time(&self) -> R {
        *self.times.last().expect("trajectory has at least the initial point")
    }

    /// Cubic Hermite interpolation at `t` (clamped to the integration span).
    pub fn state_at(&self, t: R) -> Vec<R> {
        let first = self.times[0];
        let last = self.final_time();
        if t <= first {
            return self.states[0].clone();
        }
        if t >= last {
            return self.final_state().to_vec();
        }
        // Largest index with times[idx] <= t.
        let idx = match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.states[i].clone(),
            Err(i) => i - 1,
        };
        let t0 = self.times[idx];
        let t1 = self.times[idx + 1];
        let h = t1 - t0;
        let theta = (t - t0) / h;
        let th2 = theta * theta;
        let th3 = th2 * theta;
        let h00 = two::<R>() * th3 - R::cast(3.0) * th2 + R::one();
        let h10 = th3 - two::<R>() * th2 + theta;
        let h01 = -two::<R>() * th3 + R::cast(3.0) * th2;
        let h11 = th3 - th2;
        let y0 = &self.states[idx];
        let y1 = &self.states[idx + 1];
        let f0 = &self.derivs[idx];
        let f1 = &self.derivs[idx + 1];
        (0..y0.len())
            .map(|i| h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i])
            .collect()
    }

    /// States interpolated on a time grid.
    pub fn sample(&self, times: &[R]) -> Vec<Vec<R>> {
        times.iter().map(|&t| self.state_at(t)).collect()
    }
}

fn validate<R: Scalar, F>(problem: &OdeProblem<R, F>) -> Result<(), OdeError> {
    if problem.y0.len() != problem.dim {
        return Err(OdeError::InvalidSetup(format!(
            "y0 has length {} but dim = {}",
            problem.y0.len(),
            problem.dim
        )));
    }
    if problem.y0.iter().any(|v| !v.is_finite()) {
        return Err(OdeError::InvalidSetup("y0 must be finite".into()));
    }
    let (t0, t1) = problem.t_span;
    if !(t1 > t0) {
        return Err(OdeError::InvalidSetup("t_span must satisfy t1 > t0".into()));
    }
    let rtol = problem.rtol.to_f64().unwrap_or(f64::NAN);
    if !(1e-10..=1e-3).contains(&rtol) {
        return Err(OdeError::InvalidSetup(format!(
            "rtol must lie in [1e-10, 1e-3], got {rtol}"
        )));
    }
    if !(problem.atol > R::zero()) {
        return Err(OdeError::InvalidSetup("atol must be positive".into()));
    }
    Ok(())
}

/// Integrates the problem; the trajectory always contains the state at the
/// final time.
pub fn integrate<R, F>(
    problem: &OdeProblem<R, F>,
    settings: &SolverSettings<R>,
) -> Result<Trajectory<R>, OdeError>
where
    R: Scalar,
    F: Fn(R, &[R], &mut [R]) + Sync,
{
    validate(problem)?;
    match settings.method {
        Method::Sdirk => sdirk::integrate(problem, settings),
        Method::DormandPrince => dopri::integrate(problem, settings),
    }
}

/// Integrates with one augmented coordinate `dA/dt = observe(y)` and returns
/// the trajectory of the augmented system plus `A(t_end)`.
pub fn auc_augmented<R, F, G>(
    problem: &OdeProblem<R, F>,
    observe: G,
    settings: &SolverSettings<R>,
) -> Result<(Trajectory<R>, R), OdeError>
where
    R: Scalar,
    F: Fn(R, &[R], &mut [R]) + Sync,
    G: Fn(&[R]) -> R + Sync,
{
    let dim = problem.dim;
    let mut y0 = problem.y0.clone();
    y0.push(R::zero());
    let augmented = OdeProblem {
        dim: dim + 1,
        rhs: |t: R, y: &[R], dydt: &mut [R]| {
            (problem.rhs)(t, &y[..dim], &mut dydt[..dim]);
            dydt[dim] = observe(&y[..dim]);
        },
        y0,
        t_span: problem.t_span,
        rtol: problem.rtol,
        atol: problem.atol,
    };
    let trajectory = integrate(&augmented, settings)?;
    let auc = *trajectory.final_state().last().unwrap();
    Ok((trajectory, auc))
}

// ---- shared step-control machinery -------------------------------------

/// RMS of the error scaled by `atol + rtol·max(|y0|, |y1|)`; accept when <= 1.
pub(crate) fn error_norm<R: Scalar>(err: &[R], y0: &[R], y1: &[R], rtol: R, atol: R) -> R {
    let n = R::from_usize(err.len()).unwrap();
    let sum = err
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(&e, (&a, &b))| {
            let w = atol + rtol * a.abs().max(b.abs());
            let s = e / w;
            s * s
        })
        .sum::<R>();
    (sum / n).sqrt()
}

/// Step-size multiplier for an embedded pair of the given error order.
pub(crate) fn step_factor<R: Scalar>(err: R, order: u32, after_reject: bool) -> R {
    let safety = R::cast(0.9);
    let exponent = R::one() / R::from_u32(order).unwrap();
    let raw = if err <= R::zero() {
        R::cast(5.0)
    } else {
        safety * err.powf(-exponent)
    };
    let ceiling = if after_reject { R::one() } else { R::cast(5.0) };
    raw.max(R::cast(0.2)).min(ceiling)
}

/// Hairer-style automatic initial step: probe the derivative scale with one
/// explicit Euler step.
pub(crate) fn initial_step<R: Scalar, F>(
    problem: &OdeProblem<R, F>,
    f0: &[R],
    order: u32,
) -> R
where
    F: Fn(R, &[R], &mut [R]),
{
    let (t0, t1) = problem.t_span;
    let span = t1 - t0;
    let rtol = problem.rtol;
    let atol = problem.atol;
    let weight = |y: &[R], i: usize| atol + rtol * y[i].abs();
    let n = R::from_usize(problem.dim).unwrap();
    let d0 = (problem
        .y0
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let s = y / weight(&problem.y0, i);
            s * s
        })
        .sum::<R>()
        / n)
        .sqrt();
    let d1 = (f0
        .iter()
        .enumerate()
        .map(|(i, &f)| {
            let s = f / weight(&problem.y0, i);
            s * s
        })
        .sum::<R>()
        / n)
        .sqrt();
    let mut h0 = if d0 < R::cast(1e-5) || d1 < R::cast(1e-5) {
        R::cast(1e-6) * span
    } else {
        R::cast(0.01) * (d0 / d1)
    };
    h0 = h0.min(span);
    // Euler probe to estimate the second derivative scale.
    let y1: Vec<R> = problem.y0.iter().zip(f0).map(|(&y, &f)| y + h0 * f).collect();
    let mut f1 = vec![R::zero(); problem.dim];
    (problem.rhs)(t0 + h0, &y1, &mut f1);
    let d2 = (f1
        .iter()
        .zip(f0)
        .enumerate()
        .map(|(i, (&a, &b))| {
            let s = (a - b) / weight(&problem.y0, i);
            s * s
        })
        .sum::<R>()
        / n)
        .sqrt()
        / h0;
    let d_max = d1.max(d2);
    let h1 = if d_max <= R::cast(1e-15) {
        (R::cast(1e-6) * span).max(h0 * R::cast(1e-3))
    } else {
        (R::cast(0.01) / d_max).powf(R::one() / R::from_u32(order).unwrap())
    };
    (R::cast(100.0) * h0).min(h1).min(span)
}

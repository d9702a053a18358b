//! Levenberg-Marquardt for small dense least-squares problems.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::par::{map_range, Execution};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub lambda0: f64,
    /// Damping factor applied after an accepted step.
    pub lambda_down: f64,
    /// Damping factor applied after a rejected step.
    pub lambda_up: f64,
    pub residual_tolerance: f64,
    pub step_tolerance: f64,
    pub max_iterations: usize,
    /// Relative forward-difference step, scaled by `max(1, |x|)`.
    pub fd_step: f64,
    pub execution: Execution,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            lambda0: 1e-3,
            lambda_down: 0.3,
            lambda_up: 2.0,
            residual_tolerance: 1e-11,
            step_tolerance: 1e-14,
            max_iterations: 200,
            fd_step: 1e-7,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ResidualTolerance,
    StepTolerance,
    IterationLimit,
    /// Damping grew without finding a decrease.
    NoProgress,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmReport {
    pub x: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub stop: StopReason,
    pub lambda: f64,
}

impl LmReport {
    pub fn max_residual(&self) -> f64 {
        sup_norm(&self.residuals)
    }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Forward-difference Jacobian, one column per task.
pub fn fd_jacobian<F>(
    f: &F,
    x: &[f64],
    r: &[f64],
    step: f64,
    exec: Execution,
) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let cols = map_range(exec, x.len(), |j| {
        let mut xp = x.to_vec();
        let h = step * x[j].abs().max(1.0);
        xp[j] += h;
        // use the representable step
        let h = xp[j] - x[j];
        f(&xp).map(|rp| {
            rp.iter()
                .zip(r)
                .map(|(a, b)| (a - b) / h)
                .collect::<Vec<_>>()
        })
    });
    let mut jac = DMatrix::zeros(r.len(), x.len());
    for (j, col) in cols.into_iter().enumerate() {
        for (i, v) in col?.into_iter().enumerate() {
            jac[(i, j)] = v;
        }
    }
    Ok(jac)
}

/// Minimise `|f(x)|^2`. Errors from `f` at the starting point are returned;
/// at trial points they count as a rejected step.
pub fn levenberg_marquardt<F>(f: F, x0: &[f64], opts: &LmOptions) -> Result<LmReport>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let mut x = x0.to_vec();
    let mut r = f(&x)?;
    let mut evaluations = 1;
    let mut cost = sum_sq(&r);
    let mut lambda = opts.lambda0;
    let mut iterations = 0;
    let report = |x: Vec<f64>, r: Vec<f64>, iterations, evaluations, stop, lambda| {
        let converged = sup_norm(&r) < opts.residual_tolerance;
        LmReport {
            x,
            residuals: r,
            iterations,
            evaluations,
            converged,
            stop,
            lambda,
        }
    };

    loop {
        if sup_norm(&r) < opts.residual_tolerance {
            return Ok(report(
                x,
                r,
                iterations,
                evaluations,
                StopReason::ResidualTolerance,
                lambda,
            ));
        }
        if iterations >= opts.max_iterations {
            return Ok(report(
                x,
                r,
                iterations,
                evaluations,
                StopReason::IterationLimit,
                lambda,
            ));
        }
        iterations += 1;

        let jac = fd_jacobian(&f, &x, &r, opts.fd_step, opts.execution)?;
        evaluations += x.len();
        let jt = jac.transpose();
        let normal = &jt * &jac;
        let grad = &jt * DVector::from_column_slice(&r);
        let max_diag = normal.diagonal().amax();
        let floor = (1e-12 * max_diag).max(f64::MIN_POSITIVE);

        let mut accepted = None;
        while lambda < 1e20 {
            let mut damped = normal.clone();
            for i in 0..x.len() {
                damped[(i, i)] += lambda * normal[(i, i)].max(floor);
            }
            let Some(step) = damped.lu().solve(&(-&grad)) else {
                lambda *= opts.lambda_up;
                continue;
            };
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            evaluations += 1;
            match f(&trial) {
                Ok(rt) if rt.iter().all(|v| v.is_finite()) && sum_sq(&rt) < cost => {
                    lambda *= opts.lambda_down;
                    accepted = Some((trial, rt, step.amax()));
                    break;
                }
                _ => lambda *= opts.lambda_up,
            }
        }
        let Some((xn, rn, step_size)) = accepted else {
            return Ok(report(
                x,
                r,
                iterations,
                evaluations,
                StopReason::NoProgress,
                lambda,
            ));
        };
        x = xn;
        cost = sum_sq(&rn);
        r = rn;
        if step_size < opts.step_tolerance && sup_norm(&r) >= opts.residual_tolerance {
            return Ok(report(
                x,
                r,
                iterations,
                evaluations,
                StopReason::StepTolerance,
                lambda,
            ));
        }
    }
}

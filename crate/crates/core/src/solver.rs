//! Fixed-point and Newton iteration for implicit stage equations.
//!
//! Both solvers stop on a mixed tolerance `tol·(1 + ‖y‖)`. `iterations` counts
//! accepted updates of the iterate; the evaluation that confirms convergence
//! is not counted.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::geometry::norm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SolveFailure {
    NotConverged,
    /// Newton made no twofold residual reduction over `STAGNATION_WINDOW` iterations.
    Stagnated,
    NonFinite,
    /// Reciprocal condition number `σ_min/σ_max` of the offending Jacobian.
    SingularJacobian { rcond: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub final_increment: f64,
    pub final_residual: f64,
    pub failure: Option<SolveFailure>,
}

/// Iterates `y ← g(y)` until `‖g(y) − y‖ ≤ tol·(1 + ‖y‖)`.
///
/// On convergence the returned `y` satisfies that bound exactly; `g` was last
/// evaluated at the returned point, which callers may rely on to reuse
/// quantities computed inside `g`.
pub fn fixed_point<G>(mut g: G, y0: &[f64], tol: f64, max_iters: usize) -> (Vec<f64>, SolveReport)
where
    G: FnMut(&[f64], &mut [f64]),
{
    let mut y = y0.to_vec();
    let mut gy = vec![0.0; y.len()];
    let mut increment = f64::INFINITY;
    for k in 0..=max_iters {
        g(&y, &mut gy);
        increment = y.iter().zip(&gy).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if !increment.is_finite() {
            return (
                y,
                SolveReport {
                    converged: false,
                    iterations: k,
                    final_increment: increment,
                    final_residual: increment,
                    failure: Some(SolveFailure::NonFinite),
                },
            );
        }
        if increment <= tol * (1.0 + norm(&y)) {
            return (
                y,
                SolveReport {
                    converged: true,
                    iterations: k,
                    final_increment: increment,
                    final_residual: increment,
                    failure: None,
                },
            );
        }
        if k < max_iters {
            std::mem::swap(&mut y, &mut gy);
        }
    }
    (
        y,
        SolveReport {
            converged: false,
            iterations: max_iters,
            final_increment: increment,
            final_residual: increment,
            failure: Some(SolveFailure::NotConverged),
        },
    )
}

const MAX_BACKTRACKS: usize = 30;

/// How Newton obtains the Jacobian of the residual map.
pub enum JacobianSource<'a> {
    Analytic(&'a dyn Fn(&[f64]) -> DMatrix<f64>),
    /// Forward differences; `None` uses `h = √ε·(1 + ‖y‖)`.
    FiniteDifference(Option<f64>),
}

/// Forward-difference Jacobian of `f` at `y`, given `fy = f(y)`.
pub fn finite_difference_jacobian<F>(f: &mut F, y: &[f64], fy: &[f64], step: Option<f64>) -> DMatrix<f64>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let h = step.unwrap_or_else(|| f64::EPSILON.sqrt() * (1.0 + norm(y)));
    let n = fy.len();
    let mut jac = DMatrix::zeros(n, y.len());
    let mut yp = y.to_vec();
    let mut fp = vec![0.0; n];
    for j in 0..y.len() {
        yp[j] = y[j] + h;
        f(&yp, &mut fp);
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fy[i]) / h;
        }
        yp[j] = y[j];
    }
    jac
}

const STAGNATION_WINDOW: usize = 10;

/// Newton's method for `F(y) = 0`, stopping when `‖F(y)‖ ≤ tol·(1 + ‖y₀‖)`.
///
/// A finite-difference Jacobian is kept in factored form while each step
/// cuts the residual at least tenfold; a kept Jacobian whose full step fails to halve the residual is
/// refreshed first. Steps from a fresh Jacobian are damped by halving until
/// the residual decreases; after `MAX_BACKTRACKS` halvings the shortest step
/// is taken regardless. Iteration stops early once the residual has failed
/// to halve for `STAGNATION_WINDOW` iterations. `final_increment` is the
/// length of the last step.
pub fn newton<F>(
    mut f: F,
    y0: &[f64],
    tol: f64,
    max_iters: usize,
    jacobian: JacobianSource<'_>,
) -> (Vec<f64>, SolveReport)
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = y0.len();
    let scale = 1.0 + norm(y0);
    let mut y = y0.to_vec();
    let mut fy = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut f_trial = vec![0.0; n];
    let mut increment = 0.0;
    let report = |converged, iterations, increment, residual, failure| SolveReport {
        converged,
        iterations,
        final_increment: increment,
        final_residual: residual,
        failure,
    };
    let mut best = f64::INFINITY;
    let mut best_at = 0;
    let mut factored: Option<nalgebra::linalg::LU<f64, nalgebra::Dyn, nalgebra::Dyn>> = None;
    f(&y, &mut fy);
    for k in 0..=max_iters {
        let residual = norm(&fy);
        if !residual.is_finite() {
            return (y, report(false, k, increment, residual, Some(SolveFailure::NonFinite)));
        }
        if residual <= tol * scale {
            return (y, report(true, k, increment, residual, None));
        }
        if k == max_iters {
            return (
                y,
                report(false, k, increment, residual, Some(SolveFailure::NotConverged)),
            );
        }
        if residual <= 0.5 * best {
            best = residual;
            best_at = k;
        } else if k - best_at >= STAGNATION_WINDOW {
            return (y, report(false, k, increment, residual, Some(SolveFailure::Stagnated)));
        }
        let rhs = DVector::from_column_slice(&fy);
        let mut accepted = false;
        if let Some(lu) = &factored {
            if let Some(step) = lu.solve(&rhs).filter(|s| s.iter().all(|v| v.is_finite())) {
                for ((t, yi), si) in trial.iter_mut().zip(&y).zip(step.iter()) {
                    *t = yi - si;
                }
                f(&trial, &mut f_trial);
                let r = norm(&f_trial);
                if r.is_finite() && r <= 0.5 * residual {
                    increment = step.norm();
                    accepted = true;
                    if r > 0.1 * residual {
                        factored = None;
                    }
                }
            }
            if !accepted {
                factored = None;
                // the trial evaluation above may have clobbered state kept by f
                f(&y, &mut fy);
            }
        }
        if !accepted {
            let jac = match &jacobian {
                JacobianSource::Analytic(j) => j(&y),
                JacobianSource::FiniteDifference(h) => finite_difference_jacobian(&mut f, &y, &fy, *h),
            };
            let lu = jac.clone().lu();
            let step = lu.solve(&rhs).filter(|s| s.iter().all(|v| v.is_finite()));
            let Some(step) = step else {
                let sv = jac.singular_values();
                let max = sv.max();
                let rcond = if max > 0.0 { sv.min() / max } else { 0.0 };
                return (
                    y,
                    report(
                        false,
                        k,
                        increment,
                        residual,
                        Some(SolveFailure::SingularJacobian { rcond }),
                    ),
                );
            };
            // backtrack until the residual decreases (Armijo with c = 1e-4)
            let mut lambda = 1.0;
            let mut r = f64::INFINITY;
            for _ in 0..MAX_BACKTRACKS {
                for ((t, yi), si) in trial.iter_mut().zip(&y).zip(step.iter()) {
                    *t = yi - lambda * si;
                }
                f(&trial, &mut f_trial);
                r = norm(&f_trial);
                if r.is_finite() && r <= (1.0 - 1e-4 * lambda) * residual {
                    break;
                }
                lambda *= 0.5;
            }
            increment = lambda * step.norm();
            let reusable = matches!(jacobian, JacobianSource::FiniteDifference(_));
            if reusable && lambda == 1.0 && r <= 0.1 * residual {
                factored = Some(lu);
            }
        }
        // f was last evaluated at the new iterate
        std::mem::swap(&mut y, &mut trial);
        std::mem::swap(&mut fy, &mut f_trial);
    }
    unreachable!("loop returns at k == max_iters")
}

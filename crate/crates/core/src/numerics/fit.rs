//! Damped Gauss-Newton least squares with finite-difference Jacobians.
//!
//! The solver minimises the weighted sum of squares
//! `sum_i ((y_i - model(theta, x_i)) / y_err_i)^2` with a
//! Levenberg-style damping term `lambda * diag(JtWJ)` added to the normal
//! equations. `lambda` starts at 1e-3, shrinks tenfold after every accepted
//! step and grows tenfold after every rejected one, so the cost sequence
//! never increases. Box bounds are enforced by projecting each trial point
//! back into the box.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One observation: abscissa, value, and its 1-sigma uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataPoint {
    pub x: f64,
    pub y: f64,
    /// Statistical error used as the fit weight (must be positive; pass 1
    /// when unknown).
    pub y_err: f64,
}

/// Knobs for [`fit_least_squares`]; the defaults suit well-scaled smooth
/// problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Iteration cap before the solver reports non-convergence.
    pub max_iterations: usize,
    /// Starting damping factor `lambda`.
    pub initial_damping: f64,
    /// Relative step for finite-difference derivatives.
    pub jacobian_rel_step: f64,
    /// Declare convergence when an accepted step reduces the cost by less
    /// than this relative amount.
    pub cost_tolerance: f64,
    /// Declare convergence when an accepted step moves every parameter by
    /// less than this relative amount.
    pub step_tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iterations: 200,
            initial_damping: 1e-3,
            jacobian_rel_step: 1e-6,
            cost_tolerance: 1e-12,
            step_tolerance: 1e-11,
        }
    }
}

/// Output of the generic solver.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresSolution {
    /// Best parameters found.
    pub params: Vec<f64>,
    /// Standard error of each parameter, from the curvature at the optimum.
    pub stderr: Vec<f64>,
    /// Euclidean norm of the weighted residual vector at the optimum.
    pub residual_norm: f64,
    /// Iterations attempted (accepted or rejected).
    pub iterations: usize,
    /// Whether a convergence criterion was met before the iteration cap.
    pub converged: bool,
    /// Cost after the start point and after every accepted step;
    /// non-increasing by construction.
    pub cost_history: Vec<f64>,
}

/// Scan-fit result: the fringe-model parameters in the units used for
/// reporting.
///
/// `y0` and `sigma` (and their standard errors) are in millimetres to match
/// scan-file positions; `a` is dimensionless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Fitted pattern centre (mm).
    pub y0: f64,
    /// Fitted Gaussian envelope radius (mm).
    pub sigma: f64,
    /// Fitted fringe pedestal (dimensionless).
    pub a: f64,
    /// Norm of the weighted residuals at the optimum.
    pub residual_norm: f64,
    /// Standard errors of `[y0, sigma, a]`, first two in millimetres.
    pub param_stderr: [f64; 3],
    /// Fringe visibility `1 / (1 + 2a)` implied by the fitted pedestal.
    pub visibility: f64,
    /// Whether the solver met a convergence criterion.
    pub converged: bool,
    /// Solver iterations used.
    pub iterations: usize,
}

/// Fit `model(theta, x)` to `data` starting from `init`, constrained to
/// `bounds` (one `(lo, hi)` pair per parameter).
///
/// Errors: [`Error::InsufficientData`] when there are fewer points than
/// parameters, [`Error::Domain`] for non-positive errors or malformed
/// bounds, [`Error::SingularJacobian`] when some parameter has no effect on
/// the model, and [`Error::FitNonConvergence`] when the iteration cap is
/// reached (the partial result rides along in the error).
pub fn fit_least_squares<M>(
    mut model: M,
    data: &[DataPoint],
    init: &[f64],
    bounds: &[(f64, f64)],
    options: &FitOptions,
) -> Result<LeastSquaresSolution>
where
    M: FnMut(&[f64], f64) -> f64,
{
    let n_params = init.len();
    if n_params == 0 {
        return Err(Error::Domain("fit needs at least one parameter".into()));
    }
    if data.len() < n_params {
        return Err(Error::InsufficientData {
            needed: n_params,
            got: data.len(),
        });
    }
    if bounds.len() != n_params {
        return Err(Error::Domain(format!(
            "got {} bounds for {} parameters",
            bounds.len(),
            n_params
        )));
    }
    for (lo, hi) in bounds {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Domain(format!("malformed bound ({lo}, {hi})")));
        }
    }
    for point in data {
        if !(point.y_err > 0.0 && point.y_err.is_finite()) {
            return Err(Error::Domain(format!(
                "y_err must be positive and finite, got {} at x = {}",
                point.y_err, point.x
            )));
        }
    }

    let clamp = |theta: &mut [f64]| {
        for (value, (lo, hi)) in theta.iter_mut().zip(bounds) {
            *value = value.clamp(*lo, *hi);
        }
    };

    let mut theta: Vec<f64> = init.to_vec();
    clamp(&mut theta);

    let residuals = |model: &mut M, theta: &[f64], out: &mut [f64]| {
        for (r, point) in out.iter_mut().zip(data) {
            *r = (point.y - model(theta, point.x)) / point.y_err;
        }
    };
    let cost_of = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();

    let mut r = vec![0.0; data.len()];
    residuals(&mut model, &theta, &mut r);
    let mut cost = cost_of(&r);
    let mut history = vec![cost];

    let mut lambda = options.initial_damping;
    let mut converged = false;
    let mut iterations = 0;
    let mut jacobian = vec![0.0; data.len() * n_params];
    let mut r_plus = vec![0.0; data.len()];
    let mut r_minus = vec![0.0; data.len()];

    while iterations < options.max_iterations {
        iterations += 1;

        // Central-difference Jacobian of the residual vector.
        for j in 0..n_params {
            let h = options.jacobian_rel_step * theta[j].abs().max(1.0);
            let mut plus = theta.clone();
            plus[j] += h;
            let mut minus = theta.clone();
            minus[j] -= h;
            residuals(&mut model, &plus, &mut r_plus);
            residuals(&mut model, &minus, &mut r_minus);
            let inv = 1.0 / (plus[j] - minus[j]);
            for i in 0..data.len() {
                jacobian[i * n_params + j] = (r_plus[i] - r_minus[i]) * inv;
            }
        }

        let (normal, gradient) = normal_equations(&jacobian, &r, data.len(), n_params);
        for j in 0..n_params {
            if normal[j * n_params + j] <= 0.0 || !normal[j * n_params + j].is_finite() {
                return Err(Error::SingularJacobian);
            }
        }

        // Try damped steps until one reduces the cost.
        let mut stepped = false;
        while lambda <= 1e14 {
            let mut damped = normal.clone();
            for j in 0..n_params {
                damped[j * n_params + j] *= 1.0 + lambda;
            }
            let step = match solve(&damped, &gradient, n_params) {
                Some(s) => s,
                None => {
                    lambda *= 10.0;
                    continue;
                }
            };
            let mut trial: Vec<f64> = theta
                .iter()
                .zip(&step)
                .map(|(t, s)| t - s)
                .collect();
            clamp(&mut trial);
            residuals(&mut model, &trial, &mut r_plus);
            let trial_cost = cost_of(&r_plus);
            if trial_cost.is_finite() && trial_cost < cost {
                let rel_drop = (cost - trial_cost) / cost.max(f64::MIN_POSITIVE);
                let max_rel_step = theta
                    .iter()
                    .zip(&trial)
                    .map(|(old, new)| (new - old).abs() / old.abs().max(1.0))
                    .fold(0.0f64, f64::max);
                theta = trial;
                std::mem::swap(&mut r, &mut r_plus);
                cost = trial_cost;
                history.push(cost);
                lambda = (lambda / 10.0).max(1e-12);
                stepped = true;
                if rel_drop < options.cost_tolerance
                    || max_rel_step < options.step_tolerance
                    || cost == 0.0
                {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !stepped {
            // No representable step lowers the cost: we are at a numerical
            // minimum.
            converged = true;
        }
        if converged {
            break;
        }
    }

    // Standard errors from the undamped curvature at the final point.
    for j in 0..n_params {
        let h = options.jacobian_rel_step * theta[j].abs().max(1.0);
        let mut plus = theta.clone();
        plus[j] += h;
        let mut minus = theta.clone();
        minus[j] -= h;
        residuals(&mut model, &plus, &mut r_plus);
        residuals(&mut model, &minus, &mut r_minus);
        let inv = 1.0 / (plus[j] - minus[j]);
        for i in 0..data.len() {
            jacobian[i * n_params + j] = (r_plus[i] - r_minus[i]) * inv;
        }
    }
    let (normal, _) = normal_equations(&jacobian, &r, data.len(), n_params);
    let covariance = invert(&normal, n_params).ok_or(Error::SingularJacobian)?;
    let stderr: Vec<f64> = (0..n_params)
        .map(|j| covariance[j * n_params + j].max(0.0).sqrt())
        .collect();

    let solution = LeastSquaresSolution {
        params: theta,
        stderr,
        residual_norm: cost.sqrt(),
        iterations,
        converged,
        cost_history: history,
    };
    if converged {
        Ok(solution)
    } else {
        Err(Error::FitNonConvergence {
            partial: Box::new(FitResult::from_generic(&solution)),
        })
    }
}

impl FitResult {
    /// Package a three-parameter `(y0, sigma, a)` solution, converting the
    /// two length parameters from metres to millimetres for reporting.
    ///
    /// Solutions with a different parameter count (possible when the
    /// generic solver is used for some other model) pad with NaN rather
    /// than panic.
    pub(crate) fn from_generic(solution: &LeastSquaresSolution) -> FitResult {
        let param = |i: usize| solution.params.get(i).copied().unwrap_or(f64::NAN);
        let stderr = |i: usize| solution.stderr.get(i).copied().unwrap_or(f64::NAN);
        FitResult {
            y0: param(0) * 1e3,
            sigma: param(1) * 1e3,
            a: param(2),
            residual_norm: solution.residual_norm,
            param_stderr: [stderr(0) * 1e3, stderr(1) * 1e3, stderr(2)],
            visibility: 1.0 / (1.0 + 2.0 * param(2)),
            converged: solution.converged,
            iterations: solution.iterations,
        }
    }
}

/// Gradient of a scalar function by central differences.
///
/// The step for parameter `j` is `rel_step * max(1, |theta_j|)`.
pub fn finite_diff_gradient<F>(mut f: F, theta: &[f64], rel_step: f64) -> Vec<f64>
where
    F: FnMut(&[f64]) -> f64,
{
    let mut grad = Vec::with_capacity(theta.len());
    for j in 0..theta.len() {
        let h = rel_step * theta[j].abs().max(1.0);
        let mut plus = theta.to_vec();
        plus[j] += h;
        let mut minus = theta.to_vec();
        minus[j] -= h;
        grad.push((f(&plus) - f(&minus)) / (plus[j] - minus[j]));
    }
    grad
}

/// Build `JtJ` (row-major, `n x n`) and `Jt r` from a row-major Jacobian.
fn normal_equations(
    jacobian: &[f64],
    residuals: &[f64],
    n_points: usize,
    n_params: usize,
) -> (Vec<f64>, Vec<f64>) {
    let mut normal = vec![0.0; n_params * n_params];
    let mut gradient = vec![0.0; n_params];
    for i in 0..n_points {
        let row = &jacobian[i * n_params..(i + 1) * n_params];
        for j in 0..n_params {
            gradient[j] += row[j] * residuals[i];
            for l in j..n_params {
                normal[j * n_params + l] += row[j] * row[l];
            }
        }
    }
    for j in 0..n_params {
        for l in 0..j {
            normal[j * n_params + l] = normal[l * n_params + j];
        }
    }
    (normal, gradient)
}

/// Solve `A x = b` by Gaussian elimination with partial pivoting; `None`
/// when `A` is numerically singular.
fn solve(matrix: &[f64], rhs: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut a = matrix.to_vec();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                a[r1 * n + col]
                    .abs()
                    .partial_cmp(&a[r2 * n + col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        let pivot = a[pivot_row * n + col];
        if !pivot.is_finite() || pivot.abs() < 1e-300 {
            return None;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        for row in col + 1..n {
            let factor = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut sum = b[row];
        for k in row + 1..n {
            sum -= a[row * n + k] * x[k];
        }
        x[row] = sum / a[row * n + row];
        if !x[row].is_finite() {
            return None;
        }
    }
    Some(x)
}

/// Invert a symmetric positive-definite matrix by solving against the
/// identity columns; `None` when singular.
fn invert(matrix: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut inverse = vec![0.0; n * n];
    for col in 0..n {
        let mut unit = vec![0.0; n];
        unit[col] = 1.0;
        let column = solve(matrix, &unit, n)?;
        for row in 0..n {
            inverse[row * n + col] = column[row];
        }
    }
    Some(inverse)
}

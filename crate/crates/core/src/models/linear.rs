//! OLS, ridge and LASSO fitting.

use nalgebra::{DMatrix, DVector};

use crate::models::{Family, FitMeta, FittedModel, ModelConfig};
use crate::{Error, Result};

/// Column means of a matrix.
fn column_means(x: &DMatrix<f64>) -> DVector<f64> {
    let n = x.nrows() as f64;
    DVector::from_fn(x.ncols(), |j, _| x.column(j).sum() / n)
}

/// Centers columns in place, returning the means.
fn center_columns(x: &mut DMatrix<f64>) -> DVector<f64> {
    let means = column_means(x);
    for j in 0..x.ncols() {
        let m = means[j];
        for v in x.column_mut(j).iter_mut() {
            *v -= m;
        }
    }
    means
}

fn linear_model(
    family: Family,
    coefficients: DVector<f64>,
    intercept: f64,
    iterations: usize,
    final_loss: f64,
    config: &ModelConfig,
) -> FittedModel {
    FittedModel::Linear {
        family,
        coefficients,
        intercept,
        meta: FitMeta {
            seed: config.seed,
            iterations,
            final_loss,
            config: config.clone(),
        },
    }
}

/// Ordinary least squares through a singular value decomposition of the
/// intercept-augmented design matrix. Rank deficiency is an explicit error.
pub(crate) fn fit_ols(x: &DMatrix<f64>, y: &DVector<f64>, config: &ModelConfig) -> Result<FittedModel> {
    let n = x.nrows();
    let p = x.ncols();
    let mut design = DMatrix::from_element(n, p + 1, 1.0);
    design.view_mut((0, 1), (n, p)).copy_from(x);

    let svd = design.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let tolerance = sigma_max * (n.max(p + 1) as f64) * f64::EPSILON;
    let rank = svd.singular_values.iter().filter(|&&s| s > tolerance).count();
    if rank < p + 1 {
        return Err(Error::Singular {
            rank,
            columns: p + 1,
            tolerance,
        });
    }
    let solution = svd
        .solve(y, tolerance)
        .map_err(|e| Error::numeric(format!("SVD solve failed: {e}")))?;
    let intercept = solution[0];
    let coefficients = DVector::from_fn(p, |j, _| solution[j + 1]);
    let residual = y - &design * &solution;
    let rss = residual.norm_squared();
    Ok(linear_model(Family::Ols, coefficients, intercept, 1, rss, config))
}

/// Ridge regression: minimizes RSS + lambda·‖slopes‖²; the intercept is not
/// penalized (handled by centering).
pub(crate) fn fit_ridge(x: &DMatrix<f64>, y: &DVector<f64>, config: &ModelConfig) -> Result<FittedModel> {
    let p = x.ncols();
    let mut xc = x.clone();
    let means = center_columns(&mut xc);
    let y_mean = y.mean();
    let yc = y.map(|v| v - y_mean);

    let mut gram = xc.transpose() * &xc;
    for j in 0..p {
        gram[(j, j)] += config.lambda;
    }
    let rhs = xc.transpose() * &yc;
    let coefficients = solve_spd(gram, rhs)?;
    let intercept = y_mean - means.dot(&coefficients);
    let residual = &yc - &xc * &coefficients;
    let loss = residual.norm_squared() + config.lambda * coefficients.norm_squared();
    Ok(linear_model(Family::Ridge, coefficients, intercept, 1, loss, config))
}

/// Solves a symmetric positive (semi-)definite system, falling back to SVD
/// when the Cholesky factorization fails (lambda = 0 with collinearity is
/// reported as singular).
fn solve_spd(a: DMatrix<f64>, b: DVector<f64>) -> Result<DVector<f64>> {
    match a.clone().cholesky() {
        Some(chol) => Ok(chol.solve(&b)),
        None => {
            let p = a.ncols();
            let svd = a.svd(true, true);
            let sigma_max = svd.singular_values.max();
            let tolerance = sigma_max * p as f64 * f64::EPSILON;
            let rank = svd.singular_values.iter().filter(|&&s| s > tolerance).count();
            if rank < p {
                return Err(Error::Singular {
                    rank,
                    columns: p,
                    tolerance,
                });
            }
            svd.solve(&b, tolerance)
                .map_err(|e| Error::numeric(format!("SVD solve failed: {e}")))
        }
    }
}

fn soft_threshold(value: f64, threshold: f64) -> f64 {
    if value > threshold {
        value - threshold
    } else if value < -threshold {
        value + threshold
    } else {
        0.0
    }
}

/// LASSO objective on centered data: RSS/(2n) + lambda·‖beta‖₁.
fn lasso_loss(xc: &DMatrix<f64>, yc: &DVector<f64>, beta: &DVector<f64>, lambda: f64) -> f64 {
    let residual = yc - xc * beta;
    residual.norm_squared() / (2.0 * xc.nrows() as f64) + lambda * beta.abs().sum()
}

/// Cyclic coordinate descent. Returns (beta, sweeps, per-sweep losses);
/// errors if the maximum coefficient change has not dropped below the
/// tolerance within the sweep budget.
fn coordinate_descent(
    xc: &DMatrix<f64>,
    yc: &DVector<f64>,
    lambda: f64,
    tolerance: f64,
    max_sweeps: usize,
) -> Result<(DVector<f64>, usize, Vec<f64>)> {
    let n = xc.nrows() as f64;
    let p = xc.ncols();
    // per-coordinate curvature: mean squared column norm
    let curvature: Vec<f64> = (0..p).map(|j| xc.column(j).norm_squared() / n).collect();
    let mut beta = DVector::zeros(p);
    let mut residual = yc.clone();
    let mut losses = Vec::new();
    let mut last_change = f64::INFINITY;
    for sweep in 1..=max_sweeps {
        let mut max_change: f64 = 0.0;
        for j in 0..p {
            if curvature[j] <= f64::EPSILON {
                continue; // constant column: coefficient pinned at 0
            }
            let old = beta[j];
            let rho = xc.column(j).dot(&residual) / n + curvature[j] * old;
            let new = soft_threshold(rho, lambda) / curvature[j];
            if new != old {
                let delta: f64 = new - old;
                residual.axpy(-delta, &xc.column(j).clone_owned(), 1.0);
                beta[j] = new;
            }
            max_change = max_change.max((new - old).abs());
        }
        losses.push(lasso_loss(xc, yc, &beta, lambda));
        last_change = max_change;
        if max_change < tolerance {
            return Ok((beta, sweep, losses));
        }
    }
    Err(Error::NoConvergence {
        sweeps: max_sweeps,
        last_change,
    })
}

/// LASSO via cyclic coordinate descent on RSS/(2n) + lambda·‖beta‖₁, with an
/// unpenalized intercept (handled by centering). Coordinates are updated in
/// fixed column order, so fits are deterministic.
pub(crate) fn fit_lasso(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    config: &ModelConfig,
    standardized: bool,
) -> Result<FittedModel> {
    if !standardized {
        log::warn!("fitting LASSO on unstandardized features; the penalty is scale sensitive");
    }
    let mut xc = x.clone();
    let means = center_columns(&mut xc);
    let y_mean = y.mean();
    let yc = y.map(|v| v - y_mean);
    let (coefficients, sweeps, losses) =
        coordinate_descent(&xc, &yc, config.lambda, config.tolerance, config.max_sweeps)?;
    let intercept = y_mean - means.dot(&coefficients);
    let final_loss = losses.last().copied().unwrap_or(0.0);
    Ok(linear_model(
        Family::Lasso,
        coefficients,
        intercept,
        sweeps,
        final_loss,
        config,
    ))
}

//! Kernel ridge regression with a Gaussian kernel.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::models::{Bandwidth, FitMeta, FittedModel, ModelConfig};
use crate::{Error, Result};

/// Kernel functions available to the dual solve. `Linear` exists as an
/// internal validation hook: with it, KRR must reproduce ridge regression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    /// k(x, x') = exp(−‖x − x'‖² / (2σ²))
    Rbf { bandwidth: f64 },
    #[doc(hidden)]
    Linear,
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Kernel::Rbf { bandwidth } => {
                let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-sq / (2.0 * bandwidth * bandwidth)).exp()
            }
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
        }
    }

    /// Kernel matrix between the rows of two matrices.
    pub fn cross_matrix(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut k = DMatrix::zeros(a.nrows(), b.nrows());
        let p = a.ncols();
        let mut row_a = vec![0.0; p];
        let mut row_b = vec![0.0; p];
        for i in 0..a.nrows() {
            for (c, v) in row_a.iter_mut().enumerate() {
                *v = a[(i, c)];
            }
            for j in 0..b.nrows() {
                for (c, v) in row_b.iter_mut().enumerate() {
                    *v = b[(j, c)];
                }
                k[(i, j)] = self.eval(&row_a, &row_b);
            }
        }
        k
    }
}

/// Median of pairwise Euclidean distances between rows; the standard
/// parameter-free bandwidth choice.
pub(crate) fn median_heuristic(x: &DMatrix<f64>) -> Result<f64> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::numeric("median heuristic needs at least 2 rows"));
    }
    let mut distances = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d: f64 = (0..x.ncols())
                .map(|c| (x[(i, c)] - x[(j, c)]).powi(2))
                .sum::<f64>()
                .sqrt();
            distances.push(d);
        }
    }
    distances.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = distances.len() / 2;
    let median = if distances.len() % 2 == 0 {
        0.5 * (distances[mid - 1] + distances[mid])
    } else {
        distances[mid]
    };
    if median <= 0.0 {
        return Err(Error::numeric(
            "median pairwise distance is zero; all training inputs coincide",
        ));
    }
    Ok(median)
}

/// Fits KRR: centers the targets, solves (K + (lambda·n + jitter)·I) α = y_c
/// by Cholesky and stores the training inputs for prediction.
pub(crate) fn fit_krr(x: &DMatrix<f64>, y: &DVector<f64>, config: &ModelConfig) -> Result<FittedModel> {
    let bandwidth = match config.kernel_bandwidth {
        Bandwidth::Fixed(b) => b,
        Bandwidth::MedianHeuristic => {
            let b = median_heuristic(x)?;
            log::info!("KRR median-heuristic bandwidth: {b}");
            b
        }
    };
    let kernel = Kernel::Rbf { bandwidth };
    fit_krr_with_kernel(x, y, kernel, config)
}

#[doc(hidden)]
pub fn fit_krr_with_kernel(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    kernel: Kernel,
    config: &ModelConfig,
) -> Result<FittedModel> {
    let n = x.nrows();
    let mut k = kernel.cross_matrix(x, x);
    let jitter = 1e-10 * k.trace() / n as f64;
    let shift = config.lambda * n as f64 + jitter;
    for i in 0..n {
        k[(i, i)] += shift;
    }
    let target_mean = y.mean();
    let yc = y.map(|v| v - target_mean);
    let chol = k
        .cholesky()
        .ok_or_else(|| Error::numeric("kernel system not positive definite after jitter"))?;
    let dual_weights = chol.solve(&yc);
    Ok(FittedModel::Krr {
        train_inputs: x.clone(),
        dual_weights,
        kernel,
        target_mean,
        meta: FitMeta {
            seed: config.seed,
            iterations: 1,
            final_loss: 0.0,
            config: config.clone(),
        },
    })
}

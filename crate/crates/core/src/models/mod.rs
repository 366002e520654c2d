//! Regression model families behind one fit/predict contract.
//!
//! Five families are supported: ordinary least squares, ridge, LASSO,
//! Gaussian kernel ridge regression and a single-hidden-layer sigmoid MLP.
//! Every fit is a pure function of (dataset, train indices, config) and is
//! reproducible bitwise for a fixed seed.

mod config;
mod interactions;
mod krr;
mod linear;
mod metrics;
mod mlp;
mod serialize;

pub use config::{Bandwidth, Family, ModelConfig};
pub use interactions::add_interactions;
pub use krr::Kernel;
pub use metrics::{evaluate, evaluate_predictions, Metrics};
pub use mlp::{mlp_gradient, mlp_loss, MlpParams};
pub use serialize::{load_model, save_model, MODEL_FORMAT_VERSION};

#[doc(hidden)]
pub use krr::fit_krr_with_kernel;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, SplitIndices};
use crate::{Error, Result};

/// Training metadata carried by every fitted model. The originating config
/// is kept so a model of the same family can be refit on resampled data
/// (needed by the H-statistic null distribution).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitMeta {
    pub seed: u64,
    pub iterations: usize,
    pub final_loss: f64,
    pub config: ModelConfig,
}

/// A fitted model of any family, with a uniform deterministic
/// [`predict`](FittedModel::predict) contract.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family_params")]
pub enum FittedModel {
    /// OLS, ridge or LASSO: coefficients over the p features plus intercept.
    Linear {
        family: Family,
        coefficients: DVector<f64>,
        intercept: f64,
        meta: FitMeta,
    },
    /// Kernel ridge: dual weights over the stored training inputs.
    Krr {
        train_inputs: DMatrix<f64>,
        dual_weights: DVector<f64>,
        kernel: Kernel,
        target_mean: f64,
        meta: FitMeta,
    },
    /// One hidden sigmoid layer, linear output.
    Mlp {
        hidden_weights: DMatrix<f64>,
        hidden_bias: DVector<f64>,
        output_weights: DVector<f64>,
        output_bias: f64,
        meta: FitMeta,
    },
}

impl FittedModel {
    pub fn family(&self) -> Family {
        match self {
            FittedModel::Linear { family, .. } => *family,
            FittedModel::Krr { .. } => Family::Krr,
            FittedModel::Mlp { .. } => Family::Mlp,
        }
    }

    pub fn meta(&self) -> &FitMeta {
        match self {
            FittedModel::Linear { meta, .. }
            | FittedModel::Krr { meta, .. }
            | FittedModel::Mlp { meta, .. } => meta,
        }
    }

    /// Number of feature columns the model was trained on.
    pub fn input_width(&self) -> usize {
        match self {
            FittedModel::Linear { coefficients, .. } => coefficients.len(),
            FittedModel::Krr { train_inputs, .. } => train_inputs.ncols(),
            FittedModel::Mlp { hidden_weights, .. } => hidden_weights.ncols(),
        }
    }

    /// Scores a batch of rows. Deterministic given the fitted state.
    pub fn predict(&self, rows: &DMatrix<f64>) -> Result<DVector<f64>> {
        if rows.ncols() != self.input_width() {
            return Err(Error::Dimension {
                expected: self.input_width(),
                actual: rows.ncols(),
            });
        }
        Ok(match self {
            FittedModel::Linear {
                coefficients,
                intercept,
                ..
            } => {
                let mut out = rows * coefficients;
                out.add_scalar_mut(*intercept);
                out
            }
            FittedModel::Krr {
                train_inputs,
                dual_weights,
                kernel,
                target_mean,
                ..
            } => {
                let k = kernel.cross_matrix(rows, train_inputs);
                let mut out = k * dual_weights;
                out.add_scalar_mut(*target_mean);
                out
            }
            FittedModel::Mlp {
                hidden_weights,
                hidden_bias,
                output_weights,
                output_bias,
                ..
            } => mlp::forward(rows, hidden_weights, hidden_bias, output_weights, *output_bias),
        })
    }
}

/// Fits a model of the configured family on the training rows.
pub fn fit(d: &Dataset, train: &SplitIndices, config: &ModelConfig) -> Result<FittedModel> {
    config.validate()?;
    if train.train.is_empty() {
        return Err(Error::invalid("empty training set"));
    }
    let x = d.rows(&train.train);
    let y = d.targets(&train.train);
    match config.family {
        Family::Ols => linear::fit_ols(&x, &y, config),
        Family::Ridge => linear::fit_ridge(&x, &y, config),
        Family::Lasso => linear::fit_lasso(&x, &y, config, d.standardization_params.is_some()),
        Family::Krr => krr::fit_krr(&x, &y, config),
        Family::Mlp => mlp::fit_mlp(&x, &y, config),
    }
}

/// Convenience wrappers mirroring the per-family operations.
pub fn fit_ols(d: &Dataset, train: &SplitIndices) -> Result<FittedModel> {
    fit(d, train, &ModelConfig::ols())
}

pub fn fit_ridge(d: &Dataset, train: &SplitIndices, lambda: f64) -> Result<FittedModel> {
    fit(d, train, &ModelConfig::ridge(lambda))
}

pub fn fit_lasso(d: &Dataset, train: &SplitIndices, lambda: f64) -> Result<FittedModel> {
    fit(d, train, &ModelConfig::lasso(lambda))
}

pub fn fit_krr(
    d: &Dataset,
    train: &SplitIndices,
    lambda: f64,
    bandwidth: Bandwidth,
) -> Result<FittedModel> {
    fit(d, train, &ModelConfig::krr(lambda, bandwidth))
}

pub fn fit_mlp(d: &Dataset, train: &SplitIndices, config: &ModelConfig) -> Result<FittedModel> {
    fit(d, train, config)
}

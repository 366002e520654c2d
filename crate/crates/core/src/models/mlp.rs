//! Single-hidden-layer sigmoid MLP trained by full-batch gradient descent.
//!
//! Loss: mean squared error plus an L1 penalty on the hidden layer's weights
//! and bias only; the output layer is unregularized. Full-batch descent keeps
//! the gradient exact, so finite-difference checks hold tightly.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::models::{FitMeta, FittedModel, ModelConfig};
use crate::seed::rng_from_seed;
use crate::{Error, Result};

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Forward pass over a batch of rows.
pub(crate) fn forward(
    rows: &DMatrix<f64>,
    hidden_weights: &DMatrix<f64>,
    hidden_bias: &DVector<f64>,
    output_weights: &DVector<f64>,
    output_bias: f64,
) -> DVector<f64> {
    let activations = hidden_activations(rows, hidden_weights, hidden_bias);
    let mut out = activations * output_weights;
    out.add_scalar_mut(output_bias);
    out
}

/// n×h matrix of hidden-layer activations.
fn hidden_activations(
    rows: &DMatrix<f64>,
    hidden_weights: &DMatrix<f64>,
    hidden_bias: &DVector<f64>,
) -> DMatrix<f64> {
    let mut z = rows * hidden_weights.transpose();
    for i in 0..z.nrows() {
        for j in 0..z.ncols() {
            z[(i, j)] = sigmoid(z[(i, j)] + hidden_bias[j]);
        }
    }
    z
}

/// Parameter block for the network; also used by the gradient computation so
/// tests can probe it with finite differences.
#[derive(Debug, Clone)]
pub struct MlpParams {
    pub hidden_weights: DMatrix<f64>,
    pub hidden_bias: DVector<f64>,
    pub output_weights: DVector<f64>,
    pub output_bias: f64,
}

impl MlpParams {
    /// Seeded initialization: every parameter uniform on
    /// [−1/√fan_in, +1/√fan_in].
    pub fn init(p: usize, hidden: usize, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let limit_in = 1.0 / (p as f64).sqrt();
        let limit_out = 1.0 / (hidden as f64).sqrt();
        let hidden_weights =
            DMatrix::from_fn(hidden, p, |_, _| rng.gen_range(-limit_in..limit_in));
        let hidden_bias = DVector::from_fn(hidden, |_, _| rng.gen_range(-limit_in..limit_in));
        let output_weights = DVector::from_fn(hidden, |_, _| rng.gen_range(-limit_out..limit_out));
        let output_bias = rng.gen_range(-limit_out..limit_out);
        MlpParams {
            hidden_weights,
            hidden_bias,
            output_weights,
            output_bias,
        }
    }
}

/// Loss at the given parameters: MSE + l1·(‖W_hidden‖₁ + ‖b_hidden‖₁).
pub fn mlp_loss(x: &DMatrix<f64>, y: &DVector<f64>, params: &MlpParams, l1_hidden: f64) -> f64 {
    let preds = forward(
        x,
        &params.hidden_weights,
        &params.hidden_bias,
        &params.output_weights,
        params.output_bias,
    );
    let n = x.nrows() as f64;
    let mse = (preds - y).norm_squared() / n;
    let l1 = params.hidden_weights.abs().sum() + params.hidden_bias.abs().sum();
    mse + l1_hidden * l1
}

/// Analytic full-batch gradient of [`mlp_loss`].
pub fn mlp_gradient(x: &DMatrix<f64>, y: &DVector<f64>, params: &MlpParams, l1_hidden: f64) -> MlpParams {
    let n = x.nrows() as f64;
    let activations = hidden_activations(x, &params.hidden_weights, &params.hidden_bias);
    let mut preds = &activations * &params.output_weights;
    preds.add_scalar_mut(params.output_bias);

    // d loss / d prediction_i
    let dpred = (preds - y).map(|e| 2.0 * e / n);

    let grad_output_weights = activations.transpose() * &dpred;
    let grad_output_bias = dpred.sum();

    // back through sigmoid: dz = (dpred · w2) ∘ a(1−a)
    let mut dz = DMatrix::zeros(x.nrows(), params.hidden_bias.len());
    for i in 0..x.nrows() {
        for j in 0..params.hidden_bias.len() {
            let a = activations[(i, j)];
            dz[(i, j)] = dpred[i] * params.output_weights[j] * a * (1.0 - a);
        }
    }
    let mut grad_hidden_weights = dz.transpose() * x;
    let mut grad_hidden_bias = DVector::from_fn(params.hidden_bias.len(), |j, _| dz.column(j).sum());

    // L1 subgradient on the hidden layer (sign(0) taken as 0)
    for (g, w) in grad_hidden_weights
        .iter_mut()
        .zip(params.hidden_weights.iter())
    {
        *g += l1_hidden * w.signum() * (*w != 0.0) as u8 as f64;
    }
    for (g, b) in grad_hidden_bias.iter_mut().zip(params.hidden_bias.iter()) {
        *g += l1_hidden * b.signum() * (*b != 0.0) as u8 as f64;
    }

    MlpParams {
        hidden_weights: grad_hidden_weights,
        hidden_bias: grad_hidden_bias,
        output_weights: grad_output_weights,
        output_bias: grad_output_bias,
    }
}

pub(crate) fn fit_mlp(x: &DMatrix<f64>, y: &DVector<f64>, config: &ModelConfig) -> Result<FittedModel> {
    let mut params = MlpParams::init(x.ncols(), config.hidden_units, config.seed);
    let lr = config.learning_rate;
    let mut final_loss = f64::NAN;
    for _epoch in 0..config.epochs {
        let grad = mlp_gradient(x, y, &params, config.l1_hidden);
        params.hidden_weights -= lr * grad.hidden_weights;
        params.hidden_bias -= lr * grad.hidden_bias;
        params.output_weights -= lr * grad.output_weights;
        params.output_bias -= lr * grad.output_bias;
        final_loss = mlp_loss(x, y, &params, config.l1_hidden);
        if !final_loss.is_finite() {
            return Err(Error::Diverged { learning_rate: lr });
        }
    }
    Ok(FittedModel::Mlp {
        hidden_weights: params.hidden_weights,
        hidden_bias: params.hidden_bias,
        output_weights: params.output_weights,
        output_bias: params.output_bias,
        meta: FitMeta {
            seed: config.seed,
            iterations: config.epochs,
            final_loss,
            config: config.clone(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dead_network_outputs_bias() {
        let rows = DMatrix::from_fn(3, 2, |i, j| (i + j) as f64);
        let hidden_weights = DMatrix::zeros(4, 2);
        let hidden_bias = DVector::zeros(4);
        // sigmoid(0) = 0.5, so cancel the hidden contribution with zero
        // output weights; the prediction is the output bias alone.
        let output_weights = DVector::zeros(4);
        let preds = forward(&rows, &hidden_weights, &hidden_bias, &output_weights, 3.25);
        for p in preds.iter() {
            assert_relative_eq!(*p, 3.25);
        }
    }

    #[test]
    fn fit_is_deterministic_per_seed() {
        let x = DMatrix::from_fn(20, 2, |i, j| ((i * 3 + j) % 7) as f64 / 3.0 - 1.0);
        let y = DVector::from_fn(20, |i, _| x[(i, 0)] * x[(i, 1)]);
        let cfg = ModelConfig::mlp(5, 0.0, 200, 0.1, 42);
        let a = fit_mlp(&x, &y, &cfg).unwrap();
        let b = fit_mlp(&x, &y, &cfg).unwrap();
        assert_eq!(a.predict(&x).unwrap(), b.predict(&x).unwrap());
    }

    #[test]
    fn divergence_reports_learning_rate() {
        let x = DMatrix::from_fn(10, 1, |i, _| i as f64 * 100.0);
        let y = DVector::from_fn(10, |i, _| i as f64 * 1000.0);
        let cfg = ModelConfig::mlp(5, 0.0, 500, 1e6, 0);
        match fit_mlp(&x, &y, &cfg) {
            Err(Error::Diverged { learning_rate }) => assert_eq!(learning_rate, 1e6),
            other => panic!("expected Diverged, got {other:?}"),
        }
    }

    #[test]
    fn loss_decreases_on_learnable_toy() {
        let x = DMatrix::from_fn(50, 2, |i, j| ((i * 7 + j * 3) % 11) as f64 / 5.0 - 1.0);
        let y = DVector::from_fn(50, |i, _| (x[(i, 0)] * 2.0).tanh() + 0.3 * x[(i, 1)]);
        let params = MlpParams::init(2, 8, 1);
        let initial = mlp_loss(&x, &y, &params, 0.0);
        let cfg = ModelConfig::mlp(8, 0.0, 500, 0.2, 1);
        let m = fit_mlp(&x, &y, &cfg).unwrap();
        assert!(m.meta().final_loss < initial);
    }
}

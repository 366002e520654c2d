//! Accuracy metrics: MAE and R².

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::models::FittedModel;
use crate::{Error, Result};

/// Mean absolute error and coefficient of determination. `r2` is `None` when
/// the target has zero variance over the evaluated rows, where R² is
/// undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub mae: f64,
    pub r2: Option<f64>,
}

/// Metrics from an explicit prediction/target pair.
pub fn evaluate_predictions(predictions: &DVector<f64>, targets: &DVector<f64>) -> Result<Metrics> {
    if predictions.len() != targets.len() {
        return Err(Error::Dimension {
            expected: targets.len(),
            actual: predictions.len(),
        });
    }
    if targets.is_empty() {
        return Err(Error::invalid("cannot evaluate on an empty index set"));
    }
    let n = targets.len() as f64;
    let mae = (predictions - targets).abs().sum() / n;
    let mean = targets.mean();
    let ss_tot: f64 = targets.iter().map(|y| (y - mean).powi(2)).sum();
    let r2 = if ss_tot == 0.0 {
        None
    } else {
        let ss_res: f64 = predictions
            .iter()
            .zip(targets.iter())
            .map(|(p, y)| (y - p).powi(2))
            .sum();
        Some(1.0 - ss_res / ss_tot)
    };
    Ok(Metrics { mae, r2 })
}

/// Scores the model on the given rows of a dataset.
pub fn evaluate(m: &FittedModel, d: &Dataset, indices: &[usize]) -> Result<Metrics> {
    if indices.is_empty() {
        return Err(Error::invalid("cannot evaluate on an empty index set"));
    }
    let predictions = m.predict(&d.rows(indices))?;
    evaluate_predictions(&predictions, &d.targets(indices))
}

//! Versioned JSON model files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::models::FittedModel;
use crate::{Error, Result};

/// Current model file format version. Files declaring a newer version are
/// refused.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    model: FittedModel,
}

/// Writes a fitted model as versioned, human-inspectable JSON.
pub fn save_model(model: &FittedModel, path: impl AsRef<Path>) -> Result<()> {
    let file = ModelFile {
        version: MODEL_FORMAT_VERSION,
        model: model.clone(),
    };
    let json = serde_json::to_string_pretty(&file)?;
    std::fs::write(path, json)?;
    Ok(())
}

/// Loads a model file, refusing versions newer than this build supports.
pub fn load_model(path: impl AsRef<Path>) -> Result<FittedModel> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let version = value
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::validation("model file has no version field"))? as u32;
    if version > MODEL_FORMAT_VERSION {
        return Err(Error::UnsupportedVersion {
            found: version,
            supported: MODEL_FORMAT_VERSION,
        });
    }
    let file: ModelFile = serde_json::from_value(value)?;
    Ok(file.model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Family, FitMeta, ModelConfig};
    use nalgebra::DVector;

    fn toy_model() -> FittedModel {
        FittedModel::Linear {
            family: Family::Ols,
            coefficients: DVector::from_column_slice(&[2.0, -1.5]),
            intercept: 0.25,
            meta: FitMeta {
                seed: 7,
                iterations: 1,
                final_loss: 0.0,
                config: ModelConfig::ols(),
            },
        }
    }

    #[test]
    fn round_trip_preserves_predictions() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let m = toy_model();
        save_model(&m, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        let rows = nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -3.0, 0.5]);
        assert_eq!(m.predict(&rows).unwrap(), loaded.predict(&rows).unwrap());
    }

    #[test]
    fn newer_version_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&toy_model(), &path).unwrap();
        let mut value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        value["version"] = serde_json::json!(99);
        std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();
        match load_model(&path) {
            Err(Error::UnsupportedVersion { found, supported }) => {
                assert_eq!(found, 99);
                assert_eq!(supported, MODEL_FORMAT_VERSION);
            }
            other => panic!("expected UnsupportedVersion, got {other:?}"),
        }
    }
}

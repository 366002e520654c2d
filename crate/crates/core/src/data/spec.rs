//! Variable typing and the JSON spec file format.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Role of a column: continuous real, strict {0,1} binary, or categorical
/// (expanded to a one-hot group at ingestion).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableKind {
    Continuous,
    Binary,
    Categorical,
}

/// Elementwise transform applied once by [`apply_transform`].
///
/// `Log` requires strictly positive values, `Log1p` nonnegative values.
///
/// [`apply_transform`]: crate::data::Dataset::apply_transform
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    #[default]
    None,
    Log,
    Log1p,
}

/// Per-column metadata carried by a [`Dataset`](crate::data::Dataset).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub kind: VariableKind,
    /// Group identifier linking mutually exclusive one-hot columns.
    /// All members of a group are binary and each row sums to exactly 1
    /// across the group.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ohe_group: Option<String>,
    #[serde(default)]
    pub transform: Transform,
}

impl VariableSpec {
    pub fn continuous(name: impl Into<String>) -> Self {
        VariableSpec {
            name: name.into(),
            kind: VariableKind::Continuous,
            ohe_group: None,
            transform: Transform::None,
        }
    }

    pub fn binary(name: impl Into<String>) -> Self {
        VariableSpec {
            name: name.into(),
            kind: VariableKind::Binary,
            ohe_group: None,
            transform: Transform::None,
        }
    }
}

/// Whether a column is a model input or the prediction target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnRole {
    Feature,
    Target,
}

/// One entry of the JSON spec file: column name → typing and role.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub kind: VariableKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ohe_group: Option<String>,
    #[serde(default)]
    pub transform: Transform,
    pub role: ColumnRole,
}

/// Parsed spec file: a mapping from column name to [`ColumnSpec`] with
/// exactly one target column.
#[derive(Debug, Clone)]
pub struct DataSpec {
    pub columns: HashMap<String, ColumnSpec>,
    pub target: String,
}

impl DataSpec {
    /// Builds a spec from a name → column mapping, checking the
    /// exactly-one-target rule.
    pub fn new(columns: HashMap<String, ColumnSpec>) -> Result<Self> {
        let targets: Vec<&String> = columns
            .iter()
            .filter(|(_, c)| c.role == ColumnRole::Target)
            .map(|(n, _)| n)
            .collect();
        match targets.as_slice() {
            [t] => {
                let target = (*t).clone();
                if columns[&target].kind != VariableKind::Continuous {
                    return Err(Error::Spec(format!(
                        "target column {target:?} must be continuous"
                    )));
                }
                Ok(DataSpec { columns, target })
            }
            [] => Err(Error::Spec("spec declares no target column".into())),
            many => Err(Error::Spec(format!(
                "spec declares {} target columns; exactly one required",
                many.len()
            ))),
        }
    }

    /// Loads and validates a JSON spec file.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let columns: HashMap<String, ColumnSpec> = serde_json::from_str(&text)?;
        DataSpec::new(columns)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(kind: VariableKind, role: ColumnRole) -> ColumnSpec {
        ColumnSpec {
            kind,
            ohe_group: None,
            transform: Transform::None,
            role,
        }
    }

    #[test]
    fn exactly_one_target_required() {
        let mut m = HashMap::new();
        m.insert(
            "x".to_string(),
            col(VariableKind::Continuous, ColumnRole::Feature),
        );
        assert!(DataSpec::new(m.clone()).is_err());
        m.insert(
            "y".to_string(),
            col(VariableKind::Continuous, ColumnRole::Target),
        );
        let spec = DataSpec::new(m.clone()).unwrap();
        assert_eq!(spec.target, "y");
        m.insert(
            "z".to_string(),
            col(VariableKind::Continuous, ColumnRole::Target),
        );
        assert!(DataSpec::new(m).is_err());
    }

    #[test]
    fn spec_json_round_trips() {
        let json = r#"{
            "x1": {"kind": "continuous", "transform": "log", "role": "feature"},
            "b": {"kind": "binary", "role": "feature"},
            "y": {"kind": "continuous", "role": "target"}
        }"#;
        let columns: HashMap<String, ColumnSpec> = serde_json::from_str(json).unwrap();
        let spec = DataSpec::new(columns).unwrap();
        assert_eq!(spec.columns["x1"].transform, Transform::Log);
        assert_eq!(spec.columns["b"].kind, VariableKind::Binary);
    }
}

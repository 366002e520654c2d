//! Evaluation grids for partial dependence and ICE.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, VariableKind};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    Continuous,
    Binary,
    /// Points are indices into the one-hot group's member columns.
    OheLevel,
}

/// Evaluation points for one variable (or one one-hot group).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub column: String,
    /// Strictly ascending. Binary grids are exactly [0, 1]; OHE grids
    /// enumerate level indices 0..L.
    pub points: Vec<f64>,
    pub kind: GridKind,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Builds a grid for the named feature column or one-hot group.
///
/// Continuous columns get `g` evenly spaced points spanning the observed
/// [min, max] — the grid never extrapolates. Binary columns get [0, 1]
/// regardless of `g`. A name matching a one-hot group enumerates that
/// group's levels.
pub fn make_grid(d: &Dataset, column: &str, g: usize) -> Result<Grid> {
    if let Some((group, members)) = d.ohe_groups().into_iter().find(|(name, _)| name == column) {
        return Ok(Grid {
            column: group,
            points: (0..members.len()).map(|l| l as f64).collect(),
            kind: GridKind::OheLevel,
        });
    }
    let j = d.column_index(column)?;
    let spec = &d.specs[j];
    if spec.ohe_group.is_some() {
        return Err(Error::invalid(format!(
            "column {column:?} belongs to one-hot group {:?}; build the grid for the group instead",
            spec.ohe_group.as_deref().unwrap()
        )));
    }
    match spec.kind {
        VariableKind::Binary => Ok(Grid {
            column: column.to_string(),
            points: vec![0.0, 1.0],
            kind: GridKind::Binary,
        }),
        VariableKind::Continuous => {
            if g < 2 {
                return Err(Error::invalid("continuous grids need g ≥ 2"));
            }
            let col = d.features.column(j);
            let (min, max) = col.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, &v| {
                (a.0.min(v), a.1.max(v))
            });
            if max <= min {
                return Err(Error::validation(format!(
                    "column {column:?} is constant; no grid exists"
                )));
            }
            let step = (max - min) / (g - 1) as f64;
            let mut points: Vec<f64> = (0..g).map(|i| min + i as f64 * step).collect();
            // pin endpoints to the observed extremes exactly
            points[0] = min;
            points[g - 1] = max;
            Ok(Grid {
                column: column.to_string(),
                points,
                kind: GridKind::Continuous,
            })
        }
        VariableKind::Categorical => Err(Error::invalid(format!(
            "column {column:?} is categorical; it should have been one-hot expanded at ingestion"
        ))),
    }
}

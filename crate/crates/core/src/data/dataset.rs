//! The [`Dataset`] type and its preprocessing operations.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;

use crate::data::{Transform, VariableKind, VariableSpec};
use crate::seed::rng_from_seed;
use crate::{Error, Result};

/// Per-column standardization parameters recorded by
/// [`Dataset::standardize`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ColumnStats {
    pub mean: f64,
    /// Population standard deviation (divide by n).
    pub sd: f64,
}

/// Immutable tabular dataset: an n×p feature matrix, a length-n target,
/// ordered variable specs and a missingness mask.
///
/// Missing cells hold the sentinel value 0.0; the mask is authoritative.
/// After [`impute_mean`](Dataset::impute_mean) no cell is missing but the
/// mask still records which cells were imputed.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: DMatrix<f64>,
    pub target: DVector<f64>,
    pub specs: Vec<VariableSpec>,
    pub missing_mask: DMatrix<bool>,
    /// Per-column (mean, sd) recorded at standardization time; `None` entries
    /// mark columns that were left untouched (binary columns).
    pub standardization_params: Option<Vec<Option<ColumnStats>>>,
    /// Set by [`impute_mean`](Dataset::impute_mean): every masked cell has
    /// been filled, so the mask records provenance rather than absence.
    pub imputed: bool,
}

/// Disjoint train/test row indices covering 0..n.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

impl SplitIndices {
    /// A trivial split putting every row in the training set. Used when an
    /// operation needs "fit on everything".
    pub fn all_train(n: usize) -> Self {
        SplitIndices {
            train: (0..n).collect(),
            test: Vec::new(),
            seed: 0,
        }
    }
}

impl Dataset {
    /// Builds a dataset and checks the structural invariants: consistent
    /// dimensions, binary columns in {0,1}, and one-hot groups summing to
    /// exactly 1 per row (rows with missing group cells are skipped).
    pub fn new(
        features: DMatrix<f64>,
        target: DVector<f64>,
        specs: Vec<VariableSpec>,
        missing_mask: DMatrix<bool>,
    ) -> Result<Self> {
        let (n, p) = features.shape();
        if n == 0 || p == 0 {
            return Err(Error::validation("dataset must have n ≥ 1 and p ≥ 1"));
        }
        if target.len() != n {
            return Err(Error::validation(format!(
                "target length {} does not match row count {n}",
                target.len()
            )));
        }
        if specs.len() != p {
            return Err(Error::validation(format!(
                "{} specs for {p} columns",
                specs.len()
            )));
        }
        if missing_mask.shape() != (n, p) {
            return Err(Error::validation("missing mask shape mismatch"));
        }
        let d = Dataset {
            features,
            target,
            specs,
            missing_mask,
            standardization_params: None,
            imputed: false,
        };
        d.validate_values()?;
        Ok(d)
    }

    fn validate_values(&self) -> Result<()> {
        for (j, spec) in self.specs.iter().enumerate() {
            if spec.kind == VariableKind::Binary {
                for i in 0..self.n() {
                    let v = self.features[(i, j)];
                    if !self.missing_mask[(i, j)] && v != 0.0 && v != 1.0 {
                        return Err(Error::validation(format!(
                            "binary column {:?} contains {v} at row {i}",
                            spec.name
                        )));
                    }
                }
            }
            if spec.ohe_group.is_some() && spec.kind != VariableKind::Binary {
                return Err(Error::validation(format!(
                    "one-hot group member {:?} must be binary",
                    spec.name
                )));
            }
        }
        for (group, members) in self.ohe_groups() {
            for i in 0..self.n() {
                if members.iter().any(|&j| self.missing_mask[(i, j)]) {
                    continue;
                }
                let sum: f64 = members.iter().map(|&j| self.features[(i, j)]).sum();
                if sum != 1.0 {
                    return Err(Error::validation(format!(
                        "one-hot group {group:?} sums to {sum} at row {i}; exactly 1 required"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn p(&self) -> usize {
        self.features.ncols()
    }

    /// Index of the named feature column.
    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.specs
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// One-hot groups in first-appearance order: (group name, member column
    /// indices).
    pub fn ohe_groups(&self) -> Vec<(String, Vec<usize>)> {
        let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
        for (j, spec) in self.specs.iter().enumerate() {
            if let Some(g) = &spec.ohe_group {
                match groups.iter_mut().find(|(name, _)| name == g) {
                    Some((_, members)) => members.push(j),
                    None => groups.push((g.clone(), vec![j])),
                }
            }
        }
        groups
    }

    /// True while some cell is actually absent. After imputation the mask
    /// stays set but no cell is missing any more.
    pub fn has_missing(&self) -> bool {
        !self.imputed && self.missing_mask.iter().any(|&m| m)
    }

    /// Whether a cell is currently missing (masked and not yet imputed).
    pub fn is_cell_missing(&self, row: usize, col: usize) -> bool {
        !self.imputed && self.missing_mask[(row, col)]
    }

    /// Replaces each missing cell by the mean of its column's non-missing
    /// entries. The mask is left unchanged so imputed cells stay traceable.
    pub fn impute_mean(&self) -> Result<Dataset> {
        let mut out = self.clone();
        for j in 0..self.p() {
            let (mut sum, mut count) = (0.0, 0usize);
            for i in 0..self.n() {
                if !self.missing_mask[(i, j)] {
                    sum += self.features[(i, j)];
                    count += 1;
                }
            }
            if count == 0 {
                return Err(Error::validation(format!(
                    "column {:?} is entirely missing; no mean exists",
                    self.specs[j].name
                )));
            }
            let mean = sum / count as f64;
            for i in 0..self.n() {
                if self.missing_mask[(i, j)] {
                    out.features[(i, j)] = mean;
                }
            }
        }
        out.imputed = true;
        Ok(out)
    }

    /// Replaces each value of a continuous column by the midpoint of its bin,
    /// using k equal-width bins over the observed [min, max].
    pub fn bin_continuous(&self, column: &str, k: usize) -> Result<Dataset> {
        if k < 2 {
            return Err(Error::invalid(format!("bin count {k} must be ≥ 2")));
        }
        let j = self.column_index(column)?;
        if self.specs[j].kind != VariableKind::Continuous {
            return Err(Error::invalid(format!(
                "column {column:?} is not continuous"
            )));
        }
        let col = self.features.column(j);
        let (min, max) = col.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, &v| {
            (a.0.min(v), a.1.max(v))
        });
        if max <= min {
            return Err(Error::validation(format!(
                "column {column:?} is constant; zero-width range cannot be binned"
            )));
        }
        // already at most k distinct values: binning again would only shift
        // midpoints around, so keep the operation idempotent with a no-op
        let mut distinct: Vec<f64> = col.iter().copied().collect();
        distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        distinct.dedup();
        if distinct.len() <= k {
            return Ok(self.clone());
        }
        let width = (max - min) / k as f64;
        let mut out = self.clone();
        for i in 0..self.n() {
            let v = self.features[(i, j)];
            let mut bin = ((v - min) / width).floor() as usize;
            if bin >= k {
                bin = k - 1; // v == max lands in the last bin
            }
            out.features[(i, j)] = min + (bin as f64 + 0.5) * width;
        }
        Ok(out)
    }

    /// Shifts and scales every non-binary column to mean 0, variance 1
    /// (population convention: divide by n). Binary columns are untouched.
    /// The target is left raw; use [`standardize_with`](Self::standardize_with)
    /// to standardize it too.
    pub fn standardize(&self) -> Result<Dataset> {
        self.standardize_with(false)
    }

    /// As [`standardize`](Self::standardize), optionally standardizing the
    /// target as well.
    pub fn standardize_with(&self, include_target: bool) -> Result<Dataset> {
        if self.has_missing() {
            return Err(Error::validation(
                "dataset has missing cells; impute before standardizing",
            ));
        }
        let n = self.n() as f64;
        let mut out = self.clone();
        let mut params: Vec<Option<ColumnStats>> = Vec::with_capacity(self.p());
        for j in 0..self.p() {
            if self.specs[j].kind == VariableKind::Binary {
                params.push(None);
                continue;
            }
            let col = self.features.column(j);
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            if var <= 0.0 {
                return Err(Error::validation(format!(
                    "column {:?} has zero variance; cannot standardize",
                    self.specs[j].name
                )));
            }
            let sd = var.sqrt();
            for i in 0..self.n() {
                out.features[(i, j)] = (self.features[(i, j)] - mean) / sd;
            }
            params.push(Some(ColumnStats { mean, sd }));
        }
        if include_target {
            let mean = self.target.sum() / n;
            let var = self.target.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            if var <= 0.0 {
                return Err(Error::validation("target has zero variance".to_string()));
            }
            let sd = var.sqrt();
            out.target = self.target.map(|v| (v - mean) / sd);
        }
        out.standardization_params = Some(params);
        Ok(out)
    }

    /// Uniform random train/test split without replacement; deterministic for
    /// a fixed seed.
    pub fn split(&self, test_fraction: f64, seed: u64) -> Result<SplitIndices> {
        let n = self.n();
        if n < 2 {
            return Err(Error::invalid("need n ≥ 2 to split"));
        }
        if !(0.0..1.0).contains(&test_fraction) || test_fraction <= 0.0 {
            return Err(Error::invalid(format!(
                "test fraction {test_fraction} must lie in (0, 1)"
            )));
        }
        let n_test = (n as f64 * test_fraction).round() as usize;
        if n_test == 0 || n_test == n {
            return Err(Error::invalid(format!(
                "test fraction {test_fraction} yields an empty train or test set at n={n}"
            )));
        }
        let mut indices: Vec<usize> = (0..n).collect();
        indices.shuffle(&mut rng_from_seed(seed));
        let test = indices[..n_test].to_vec();
        let train = indices[n_test..].to_vec();
        Ok(SplitIndices { train, test, seed })
    }

    /// Applies the column's declared transform elementwise and clears the
    /// transform tag so the pipeline cannot double-apply it.
    pub fn apply_transform(&self, column: &str) -> Result<Dataset> {
        let j = self.column_index(column)?;
        let transform = self.specs[j].transform;
        let mut out = self.clone();
        for i in 0..self.n() {
            if self.missing_mask[(i, j)] {
                continue;
            }
            let v = self.features[(i, j)];
            out.features[(i, j)] = match transform {
                Transform::None => v,
                Transform::Log => {
                    if v <= 0.0 {
                        return Err(Error::validation(format!(
                            "log transform on nonpositive value {v} in column {column:?} at row {i}"
                        )));
                    }
                    v.ln()
                }
                Transform::Log1p => {
                    if v < 0.0 {
                        return Err(Error::validation(format!(
                            "log1p transform on negative value {v} in column {column:?} at row {i}"
                        )));
                    }
                    v.ln_1p()
                }
            };
        }
        out.specs[j].transform = Transform::None;
        Ok(out)
    }

    /// Applies every declared transform across the dataset.
    pub fn apply_all_transforms(&self) -> Result<Dataset> {
        let mut out = self.clone();
        let names: Vec<String> = self
            .specs
            .iter()
            .filter(|s| s.transform != Transform::None)
            .map(|s| s.name.clone())
            .collect();
        for name in names {
            out = out.apply_transform(&name)?;
        }
        Ok(out)
    }

    /// Feature sub-matrix for the given row indices.
    pub fn rows(&self, indices: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(indices.len(), self.p(), |i, j| {
            self.features[(indices[i], j)]
        })
    }

    /// Target sub-vector for the given row indices.
    pub fn targets(&self, indices: &[usize]) -> DVector<f64> {
        DVector::from_fn(indices.len(), |i, _| self.target[indices[i]])
    }
}

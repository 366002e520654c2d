//! Explicit interaction columns for linear models.

use nalgebra::{DMatrix, DVector};

use crate::data::{Dataset, Transform, VariableKind, VariableSpec};
use crate::{Error, Result};

/// Appends elementwise product columns for the named column pairs. The
/// product of two binary columns is itself binary (a logical AND); any other
/// combination is continuous. Derived columns are named `a*b`.
pub fn add_interactions(d: &Dataset, pairs: &[(String, String)]) -> Result<Dataset> {
    for (i, (a, b)) in pairs.iter().enumerate() {
        for (a2, b2) in &pairs[i + 1..] {
            if (a == a2 && b == b2) || (a == b2 && b == a2) {
                return Err(Error::invalid(format!("duplicate interaction pair ({a}, {b})")));
            }
        }
    }
    let n = d.n();
    let p = d.p();
    let mut features = DMatrix::zeros(n, p + pairs.len());
    features.view_mut((0, 0), (n, p)).copy_from(&d.features);
    let mut mask = DMatrix::from_element(n, p + pairs.len(), false);
    mask.view_mut((0, 0), (n, p)).copy_from(&d.missing_mask);
    let mut specs = d.specs.clone();

    for (offset, (a, b)) in pairs.iter().enumerate() {
        let ja = d.column_index(a)?;
        let jb = d.column_index(b)?;
        let j = p + offset;
        for i in 0..n {
            features[(i, j)] = d.features[(i, ja)] * d.features[(i, jb)];
            mask[(i, j)] = d.missing_mask[(i, ja)] || d.missing_mask[(i, jb)];
        }
        let both_binary = d.specs[ja].kind == VariableKind::Binary
            && d.specs[jb].kind == VariableKind::Binary;
        specs.push(VariableSpec {
            name: format!("{a}*{b}"),
            kind: if both_binary {
                VariableKind::Binary
            } else {
                VariableKind::Continuous
            },
            ohe_group: None,
            transform: Transform::None,
        });
    }
    let target = DVector::from(d.target.clone());
    Dataset::new(features, target, specs, mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::SplitIndices;
    use crate::models::{evaluate, fit_ols};

    fn binary_pair_dataset() -> Dataset {
        // all four (x0, x1) combinations, y = x0 AND x1
        let features = DMatrix::from_row_slice(4, 2, &[0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 1.0]);
        let target = DVector::from_column_slice(&[0.0, 0.0, 0.0, 1.0]);
        Dataset::new(
            features,
            target,
            vec![VariableSpec::binary("x0"), VariableSpec::binary("x1")],
            DMatrix::from_element(4, 2, false),
        )
        .unwrap()
    }

    #[test]
    fn binary_product_is_logical_and() {
        let d = binary_pair_dataset();
        let with = add_interactions(&d, &[("x0".into(), "x1".into())]).unwrap();
        assert_eq!(with.p(), 3);
        assert_eq!(with.specs[2].name, "x0*x1");
        assert_eq!(with.specs[2].kind, VariableKind::Binary);
        let col: Vec<f64> = with.features.column(2).iter().copied().collect();
        assert_eq!(col, vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn saturated_binary_model_is_exact() {
        let d = binary_pair_dataset();
        let with = add_interactions(&d, &[("x0".into(), "x1".into())]).unwrap();
        let split = SplitIndices::all_train(4);
        let m = fit_ols(&with, &split).unwrap();
        let metrics = evaluate(&m, &with, &split.train).unwrap();
        assert!(metrics.mae < 1e-12);
    }

    #[test]
    fn duplicate_pair_rejected() {
        let d = binary_pair_dataset();
        let pairs = vec![("x0".into(), "x1".into()), ("x1".into(), "x0".into())];
        assert!(add_interactions(&d, &pairs).is_err());
    }
}

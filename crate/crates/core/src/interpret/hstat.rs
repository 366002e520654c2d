//! Pairwise H-statistics and their null distributions.
//!
//! The squared statistic compares the two-dimensional partial dependence of
//! a variable pair against the sum of the one-dimensional partial
//! dependences, all evaluated at the observed data points and mean-centered
//! over those points:
//!
//! H² = Σᵢ (PDjk_c(i) − PDj_c(i) − PDk_c(i))² / Σᵢ PDjk_c(i)²
//!
//! H = √max(H², 0). Additive models give H = 0; a pure two-variable
//! interaction with centered independent inputs drives H toward 1.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::models::{fit, FittedModel};
use crate::seed::{derive_seed, rng_from_seed};
use crate::{Error, Result};

/// Empirical quantiles of the null H distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HQuantiles {
    pub q50: f64,
    pub q95: f64,
    pub q99: f64,
}

/// One entry of an [`HReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HPair {
    pub j: String,
    pub k: String,
    pub h: f64,
    pub null_quantiles: Option<HQuantiles>,
    pub exceeds_null_95: Option<bool>,
}

/// Pairwise interaction report, sorted descending by H.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HReport {
    pub pairs: Vec<HPair>,
}

/// Evenly spaced row subset used when the evaluation budget `g` is smaller
/// than the dataset. Deterministic.
fn evaluation_rows(n: usize, cap: usize) -> Vec<usize> {
    if cap == 0 || cap >= n {
        return (0..n).collect();
    }
    (0..cap).map(|i| i * n / cap).collect()
}

/// Partial dependence of the column set `cols` evaluated at each evaluation
/// row's own values, averaging over the evaluation rows as background.
/// Returns one value per evaluation row.
fn pd_at_points(
    m: &FittedModel,
    features: &DMatrix<f64>,
    cols: &[usize],
    rows: &[usize],
) -> Result<Vec<f64>> {
    let n_bg = rows.len() as f64;
    let mut background = DMatrix::from_fn(rows.len(), features.ncols(), |i, j| {
        features[(rows[i], j)]
    });
    let original: Vec<DVector<f64>> = cols
        .iter()
        .map(|&c| background.column(c).clone_owned())
        .collect();
    let mut out = Vec::with_capacity(rows.len());
    for &a in rows {
        for &c in cols {
            let v = features[(a, c)];
            for i in 0..background.nrows() {
                background[(i, c)] = v;
            }
        }
        let preds = m.predict(&background)?;
        out.push(preds.sum() / n_bg);
        for (slot, &c) in cols.iter().enumerate() {
            background.set_column(c, &original[slot]);
        }
    }
    Ok(out)
}

fn centered(values: &[f64]) -> Vec<f64> {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| v - mean).collect()
}

/// Pairwise H between two feature columns, evaluated over at most `g`
/// dataset rows (0 means all rows). Negative H² from numerical noise is
/// clamped to 0 before the square root.
pub fn compute_h_pairwise(
    m: &FittedModel,
    d: &Dataset,
    j: &str,
    k: &str,
    g: usize,
) -> Result<f64> {
    if j == k {
        return Err(Error::invalid("H statistic needs two distinct columns"));
    }
    if d.has_missing() {
        return Err(Error::validation("dataset has missing cells; impute first"));
    }
    let mut cj = d.column_index(j)?;
    let mut ck = d.column_index(k)?;
    // canonical order makes H(j, k) and H(k, j) bitwise identical
    if cj > ck {
        std::mem::swap(&mut cj, &mut ck);
    }
    let rows = evaluation_rows(d.n(), g);
    let pd_j = centered(&pd_at_points(m, &d.features, &[cj], &rows)?);
    let pd_k = centered(&pd_at_points(m, &d.features, &[ck], &rows)?);
    let pd_jk = centered(&pd_at_points(m, &d.features, &[cj, ck], &rows)?);

    let numerator: f64 = (0..rows.len())
        .map(|i| (pd_jk[i] - pd_j[i] - pd_k[i]).powi(2))
        .sum();
    let denominator: f64 = pd_jk.iter().map(|v| v * v).sum();
    if denominator <= f64::EPSILON * rows.len() as f64 {
        return Err(Error::UndefinedH {
            j: j.to_string(),
            k: k.to_string(),
        });
    }
    let h_squared = numerator / denominator;
    if h_squared < 0.0 {
        log::debug!("clamping negative H² = {h_squared:e} for ({j}, {k})");
    }
    Ok(h_squared.max(0.0).sqrt())
}

/// Null distribution of H under a no-interaction surrogate of the fitted
/// model.
///
/// The surrogate is F_add(x) = PD_j(x_j) + PD_k(x_k) − mean(f̂): additive by
/// construction. Each replicate bootstrap-resamples rows, adds a permuted
/// residual of the data around F_add, refits a fresh model of the same
/// family and config, and records its H. Deterministic given the seed; each
/// replicate derives an independent sub-seed.
pub fn h_null_distribution(
    m: &FittedModel,
    d: &Dataset,
    j: &str,
    k: &str,
    g: usize,
    n_null: usize,
    seed: u64,
) -> Result<HQuantiles> {
    Ok(quantiles(&h_null_samples(m, d, j, k, g, n_null, seed)?))
}

/// The raw null H values behind [`h_null_distribution`].
pub fn h_null_samples(
    m: &FittedModel,
    d: &Dataset,
    j: &str,
    k: &str,
    g: usize,
    n_null: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if n_null < 20 {
        return Err(Error::invalid("null distribution needs n_null ≥ 20"));
    }
    if d.has_missing() {
        return Err(Error::validation("dataset has missing cells; impute first"));
    }
    let cj = d.column_index(j)?;
    let ck = d.column_index(k)?;
    let n = d.n();
    let all: Vec<usize> = (0..n).collect();
    let bg = evaluation_rows(n, g);

    let predictions = m.predict(&d.features)?;
    let grand_mean = predictions.mean();
    // additive surrogate evaluated at every observed row
    let pd_j = pd_at_points_full(m, &d.features, cj, &all, &bg)?;
    let pd_k = pd_at_points_full(m, &d.features, ck, &all, &bg)?;
    let f_add: Vec<f64> = (0..n).map(|i| pd_j[i] + pd_k[i] - grand_mean).collect();
    let residuals: Vec<f64> = (0..n).map(|i| d.target[i] - f_add[i]).collect();

    let config = &m.meta().config;
    let mut h_values = Vec::with_capacity(n_null);
    for b in 0..n_null {
        let rep_seed = derive_seed(seed, b as u64, 0);
        let mut rng = rng_from_seed(rep_seed);
        let boot: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);

        let features = DMatrix::from_fn(n, d.p(), |i, c| d.features[(boot[i], c)]);
        let target = DVector::from_fn(n, |i, _| f_add[boot[i]] + residuals[perm[i]]);
        let replicate = Dataset {
            features,
            target,
            specs: d.specs.clone(),
            missing_mask: DMatrix::from_element(n, d.p(), false),
            standardization_params: d.standardization_params.clone(),
            imputed: false,
        };
        let refit_config = config.clone().with_seed(rep_seed);
        let refit = fit(
            &replicate,
            &crate::data::SplitIndices::all_train(n),
            &refit_config,
        )?;
        h_values.push(compute_h_pairwise(&refit, &replicate, j, k, g)?);
    }
    Ok(h_values)
}

/// PD of one column evaluated at `points` rows, averaging over `background`
/// rows.
fn pd_at_points_full(
    m: &FittedModel,
    features: &DMatrix<f64>,
    col: usize,
    points: &[usize],
    background: &[usize],
) -> Result<Vec<f64>> {
    let n_bg = background.len() as f64;
    let mut bg = DMatrix::from_fn(background.len(), features.ncols(), |i, j| {
        features[(background[i], j)]
    });
    let mut out = Vec::with_capacity(points.len());
    for &a in points {
        let v = features[(a, col)];
        for i in 0..bg.nrows() {
            bg[(i, col)] = v;
        }
        out.push(m.predict(&bg)?.sum() / n_bg);
    }
    Ok(out)
}

fn quantiles(values: &[f64]) -> HQuantiles {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pick = |q: f64| {
        let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
        sorted[idx]
    };
    HQuantiles {
        q50: pick(0.50),
        q95: pick(0.95),
        q99: pick(0.99),
    }
}

/// Pairwise H for every pair among the named columns, sorted descending by
/// H. With `nulls = Some((n_null, seed))` each pair also carries its null
/// quantiles and the 95% exceedance flag.
pub fn h_matrix(
    m: &FittedModel,
    d: &Dataset,
    columns: &[String],
    g: usize,
    nulls: Option<(usize, u64)>,
) -> Result<HReport> {
    if columns.len() < 2 {
        return Err(Error::invalid("H matrix needs at least 2 columns"));
    }
    let mut pairs = Vec::new();
    for (a, j) in columns.iter().enumerate() {
        for k in &columns[a + 1..] {
            let h = compute_h_pairwise(m, d, j, k, g)?;
            let (null_quantiles, exceeds_null_95) = match nulls {
                Some((n_null, seed)) => {
                    // the pair index makes each pair's null ensemble independent
                    let pair_seed = derive_seed(seed, a as u64, columns.iter().position(|c| c == k).unwrap() as u64);
                    let q = h_null_distribution(m, d, j, k, g, n_null, pair_seed)?;
                    (Some(q), Some(h > q.q95))
                }
                None => (None, None),
            };
            pairs.push(HPair {
                j: j.clone(),
                k: k.clone(),
                h,
                null_quantiles,
                exceeds_null_95,
            });
        }
    }
    pairs.sort_by(|a, b| b.h.partial_cmp(&a.h).unwrap());
    Ok(HReport { pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{SplitIndices, VariableSpec};
    use crate::models::{fit_krr, fit_ols, Bandwidth};
    use approx::assert_relative_eq;

    fn dataset(rows: &[[f64; 2]], y: impl Fn(f64, f64) -> f64) -> Dataset {
        let n = rows.len();
        Dataset::new(
            DMatrix::from_fn(n, 2, |i, j| rows[i][j]),
            DVector::from_fn(n, |i, _| y(rows[i][0], rows[i][1])),
            vec![VariableSpec::continuous("x0"), VariableSpec::continuous("x1")],
            DMatrix::from_element(n, 2, false),
        )
        .unwrap()
    }

    fn grid_rows() -> Vec<[f64; 2]> {
        let vals = [-1.5, -0.5, 0.5, 1.5];
        let mut rows = Vec::new();
        for &a in &vals {
            for &b in &vals {
                rows.push([a, b]);
            }
        }
        rows
    }

    #[test]
    fn additive_model_has_zero_h() {
        let d = dataset(&grid_rows(), |a, b| 2.0 * a - 3.0 * b + 1.0);
        let m = fit_ols(&d, &SplitIndices::all_train(d.n())).unwrap();
        let h = compute_h_pairwise(&m, &d, "x0", "x1", 0).unwrap();
        assert!(h < 1e-8, "additive H = {h}");
    }

    #[test]
    fn pure_product_has_h_one() {
        // a near-interpolating KRR learns f = x0·x1 from raw features; with
        // centered inputs the centered one-dimensional PDs vanish and
        // numerator equals denominator
        let d = dataset(&grid_rows(), |a, b| a * b);
        let m = fit_krr(&d, &SplitIndices::all_train(d.n()), 0.0, Bandwidth::Fixed(1.0)).unwrap();
        let h = compute_h_pairwise(&m, &d, "x0", "x1", 0).unwrap();
        assert_relative_eq!(h, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn h_is_symmetric_bitwise() {
        let d = dataset(&grid_rows(), |a, b| a * b + 0.5 * a);
        let m = fit_krr(&d, &SplitIndices::all_train(d.n()), 0.01, Bandwidth::Fixed(1.0)).unwrap();
        let h1 = compute_h_pairwise(&m, &d, "x0", "x1", 0).unwrap();
        let h2 = compute_h_pairwise(&m, &d, "x1", "x0", 0).unwrap();
        assert_eq!(h1.to_bits(), h2.to_bits());
    }

    #[test]
    fn constant_model_h_is_undefined() {
        let d = dataset(&grid_rows(), |_, _| 4.0);
        let m = fit_ols(&d, &SplitIndices::all_train(d.n())).unwrap();
        match compute_h_pairwise(&m, &d, "x0", "x1", 0) {
            Err(Error::UndefinedH { .. }) => {}
            other => panic!("expected UndefinedH, got {other:?}"),
        }
    }

    #[test]
    fn same_column_rejected() {
        let d = dataset(&grid_rows(), |a, b| a + b);
        let m = fit_ols(&d, &SplitIndices::all_train(d.n())).unwrap();
        assert!(compute_h_pairwise(&m, &d, "x0", "x0", 0).is_err());
    }

    #[test]
    fn null_distribution_is_deterministic() {
        let d = dataset(&grid_rows(), |a, b| a + 0.5 * b);
        let m = fit_ols(&d, &SplitIndices::all_train(d.n())).unwrap();
        let q1 = h_null_distribution(&m, &d, "x0", "x1", 0, 20, 9).unwrap();
        let q2 = h_null_distribution(&m, &d, "x0", "x1", 0, 20, 9).unwrap();
        assert_eq!(q1, q2);
        assert!(q1.q50 <= q1.q95 && q1.q95 <= q1.q99);
    }

    #[test]
    fn matrix_ranks_true_interaction_first() {
        // three features, interaction only between x0 and x1
        let vals = [-1.0, 0.0, 1.0];
        let mut rows = Vec::new();
        for &a in &vals {
            for &b in &vals {
                for &c in &vals {
                    rows.push([a, b, c]);
                }
            }
        }
        let n = rows.len();
        let features = DMatrix::from_fn(n, 3, |i, j| rows[i][j]);
        let target = DVector::from_fn(n, |i, _| {
            rows[i][0] * rows[i][1] + 0.5 * rows[i][2]
        });
        let specs = vec![
            VariableSpec::continuous("x0"),
            VariableSpec::continuous("x1"),
            VariableSpec::continuous("x2"),
        ];
        let d = Dataset::new(features, target, specs, DMatrix::from_element(n, 3, false)).unwrap();
        let m = fit_krr(&d, &SplitIndices::all_train(n), 0.0, Bandwidth::Fixed(1.0)).unwrap();
        let cols = vec!["x0".to_string(), "x1".to_string(), "x2".to_string()];
        let report = h_matrix(&m, &d, &cols, 0, None).unwrap();
        assert_eq!(report.pairs.len(), 3);
        let top = &report.pairs[0];
        assert!(
            (top.j == "x0" && top.k == "x1") || (top.j == "x1" && top.k == "x0"),
            "top pair was ({}, {})",
            top.j,
            top.k
        );
    }
}

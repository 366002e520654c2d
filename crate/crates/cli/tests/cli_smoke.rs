//! End-to-end smoke tests of the six subcommands against the bundled
//! 20-row example dataset.

use std::path::{Path, PathBuf};
use std::process::Command;

fn data_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn glassbox(args: &[&str], out: &Path) -> std::process::Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_glassbox"));
    cmd.args(args).arg("--out").arg(out);
    cmd.output().expect("spawn glassbox")
}

fn fit_example(dir: &Path, family: &str, extra: &[&str]) -> std::process::Output {
    let data = data_path("example.csv");
    let spec = data_path("example.json");
    let mut args = vec![
        "fit",
        "--data",
        data.to_str().unwrap(),
        "--spec",
        spec.to_str().unwrap(),
        "--model-family",
        family,
    ];
    args.extend_from_slice(extra);
    glassbox(&args, dir)
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn fit_smoke_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = fit_example(dir.path(), "ols", &[]);
    assert!(out.status.success());
    let metrics = read_csv(&dir.path().join("metrics.csv"));
    assert_eq!(metrics.len(), 2);
    for row in &metrics {
        let mae: f64 = row[1].parse().unwrap();
        let r2: f64 = row[2].parse().unwrap();
        assert!(mae.is_finite() && mae >= 0.0);
        assert!(r2 <= 1.0);
    }
    assert!(dir.path().join("model.json").exists());
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn huge_lasso_lambda_deactivates_all_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let out = fit_example(dir.path(), "lasso", &["--lambda", "1e9"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        stdout.contains("nonzero coefficients: 0/2"),
        "stdout was: {stdout}"
    );
}

#[test]
fn pd_slope_matches_ols_coefficient_and_ice_means_match_pd() {
    let dir = tempfile::tempdir().unwrap();
    assert!(fit_example(dir.path(), "ols", &[]).status.success());

    // the model was fit on standardized features; read its x0 coefficient
    let model: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("model.json")).unwrap())
            .unwrap();
    // coefficients serialize as a nalgebra vector: [[values], nrows, ncols]
    let coef = model["model"]["coefficients"][0][0].as_f64().unwrap();

    let data = data_path("example.csv");
    let spec = data_path("example.json");
    let model_path = dir.path().join("model.json");
    let common = [
        "--data",
        data.to_str().unwrap(),
        "--spec",
        spec.to_str().unwrap(),
        "--model",
        model_path.to_str().unwrap(),
        "--column",
        "x0",
        "--grid",
        "15",
    ];
    let mut pd_args = vec!["pd"];
    pd_args.extend_from_slice(&common);
    assert!(glassbox(&pd_args, dir.path()).status.success());
    let mut ice_args = vec!["ice"];
    ice_args.extend_from_slice(&common);
    assert!(glassbox(&ice_args, dir.path()).status.success());

    let pd = read_csv(&dir.path().join("pd.csv"));
    let xs: Vec<f64> = pd.iter().map(|r| r[0].parse().unwrap()).collect();
    let ys: Vec<f64> = pd.iter().map(|r| r[1].parse().unwrap()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!(
        (slope - coef).abs() < 1e-8,
        "PD slope {slope} vs coefficient {coef}"
    );

    // column means of the ICE output reproduce the PD output
    let ice = read_csv(&dir.path().join("ice.csv"));
    for (v, &x) in xs.iter().enumerate() {
        let vals: Vec<f64> = ice
            .iter()
            .filter(|r| r[1].parse::<f64>().unwrap() == x)
            .map(|r| r[2].parse().unwrap())
            .collect();
        assert_eq!(vals.len(), 20);
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        assert!((mean - ys[v]).abs() < 1e-12);
    }
}

#[test]
fn hstat_null_calibration_on_additive_fit() {
    // an additive-truth OLS fit should rarely exceed its null 95% quantile
    let dir = tempfile::tempdir().unwrap();
    assert!(fit_example(dir.path(), "ols", &[]).status.success());
    let data = data_path("example.csv");
    let spec = data_path("example.json");
    let model_path = dir.path().join("model.json");

    let mut exceed_count = 0;
    let runs = 10;
    for seed in 0..runs {
        let seed_str = seed.to_string();
        let args = [
            "hstat",
            "--data",
            data.to_str().unwrap(),
            "--spec",
            spec.to_str().unwrap(),
            "--model",
            model_path.to_str().unwrap(),
            "--nulls",
            "20",
            "--seed",
            &seed_str,
        ];
        assert!(glassbox(&args, dir.path()).status.success());
        let rows = read_csv(&dir.path().join("hstat.csv"));
        if rows.iter().any(|r| r[6] == "true") {
            exceed_count += 1;
        }
    }
    assert!(
        exceed_count <= 1,
        "additive fit exceeded its null in {exceed_count}/{runs} runs"
    );
}

#[test]
fn mlp_learns_synthetic_ohe_sequence_data() {
    // 5 positions x 4 levels, additive level effects, reference network shape
    let dir = tempfile::tempdir().unwrap();
    let positions = 5;
    let levels = 4;
    let n = 300;
    let mut csv = String::new();
    let header: Vec<String> = (0..positions)
        .flat_map(|p| (0..levels).map(move |l| format!("p{p}=l{l}")))
        .chain(std::iter::once("y".to_string()))
        .collect();
    csv.push_str(&header.join(","));
    csv.push('\n');
    let mut spec = serde_json::Map::new();
    for p in 0..positions {
        for l in 0..levels {
            spec.insert(
                format!("p{p}=l{l}"),
                serde_json::json!({"kind": "binary", "ohe_group": format!("p{p}"), "role": "feature"}),
            );
        }
    }
    spec.insert(
        "y".to_string(),
        serde_json::json!({"kind": "continuous", "role": "target"}),
    );
    let mut state = 1234u64;
    for _ in 0..n {
        let mut y = 0.0;
        let mut cells = Vec::new();
        for p in 0..positions {
            // small deterministic PRNG for level choices
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let level = (state >> 33) as usize % levels;
            for l in 0..levels {
                cells.push(if l == level { "1" } else { "0" }.to_string());
            }
            y += ((p * levels + level) as f64 * 0.37).sin();
        }
        cells.push(format!("{y}"));
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    let data_path = dir.path().join("seq.csv");
    let spec_path = dir.path().join("seq.json");
    std::fs::write(&data_path, csv).unwrap();
    std::fs::write(&spec_path, serde_json::to_string(&spec).unwrap()).unwrap();

    let args = [
        "fit",
        "--data",
        data_path.to_str().unwrap(),
        "--spec",
        spec_path.to_str().unwrap(),
        "--model-family",
        "mlp",
        "--hidden-units",
        "10",
        "--l1-hidden",
        "1e-4",
        "--epochs",
        "3000",
        "--seed",
        "2",
    ];
    let out = glassbox(&args, dir.path());
    assert!(out.status.success());
    let metrics = read_csv(&dir.path().join("metrics.csv"));
    let test_r2: f64 = metrics[1][2].parse().unwrap();
    assert!(test_r2 > 0.0, "test R^2 = {test_r2}");
}

#[test]
fn compare_emits_table_and_unit_self_correlation() {
    let dir = tempfile::tempdir().unwrap();
    let data = data_path("example.csv");
    let spec = data_path("example.json");
    let args = [
        "compare",
        "--data",
        data.to_str().unwrap(),
        "--spec",
        spec.to_str().unwrap(),
        "--families",
        "ols,ridge,krr",
    ];
    assert!(glassbox(&args, dir.path()).status.success());
    let table = read_csv(&dir.path().join("compare.csv"));
    assert_eq!(table.len(), 3);
    let corr = read_csv(&dir.path().join("correlations.csv"));
    for (i, row) in corr.iter().enumerate() {
        let self_corr: f64 = row[i + 1].parse().unwrap();
        assert!((self_corr - 1.0).abs() < 1e-9);
    }
}

#[test]
fn missing_input_fails_with_io_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = data_path("example.json");
    let args = [
        "fit",
        "--data",
        "/nonexistent/nope.csv",
        "--spec",
        spec.to_str().unwrap(),
        "--model-family",
        "ols",
    ];
    let out = glassbox(&args, dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with("error[io]:"), "stderr was: {stderr}");
    assert_eq!(stderr.lines().count(), 1);
}

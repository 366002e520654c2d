//! `glassbox` command-line tool: fit regression models on tabular CSV data,
//! probe them with partial dependence / ICE / H-statistic interaction
//! reports, and run the simulation ablation sweeps.

mod manifest;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use glassbox::data::Dataset;
use glassbox::interpret::{compute_ice, h_matrix, make_grid};
use glassbox::models::{evaluate, fit, load_model, save_model, Family, FittedModel};
use glassbox::simulate::{
    ablate_binning, ablate_interaction, ablate_missing, ablate_nuisance, ablate_size, SimConfig,
    SweepResult, DEFAULT_NUISANCE_RHO, DEFAULT_REPLICATES,
};
use glassbox::{Error, Result};

use manifest::Manifest;
use pipeline::{fmt, parse_family, parse_list, write_csv_file, DataArgs, ModelArgs};

#[derive(Parser)]
#[command(name = "glassbox", version, about = "Regression with model-agnostic interpretability")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model and write model JSON plus metrics CSV
    Fit {
        #[command(flatten)]
        data: DataArgs,
        /// One of: ols, ridge, lasso, krr, mlp
        #[arg(long)]
        model_family: String,
        #[command(flatten)]
        model: ModelArgs,
        /// Held-out fraction for the test split
        #[arg(long, default_value_t = 0.2)]
        test_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Partial dependence curve of one column (mean of the ICE curves)
    Pd {
        #[command(flatten)]
        data: DataArgs,
        /// Saved model JSON from `fit`
        #[arg(long)]
        model: PathBuf,
        /// Column or one-hot group to sweep
        #[arg(long)]
        column: String,
        /// Grid points for continuous columns
        #[arg(long, default_value_t = 50)]
        grid: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Per-instance ICE curves of one column, long format
    Ice {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        column: String,
        #[arg(long, default_value_t = 20)]
        grid: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Pairwise H-statistic interaction report
    Hstat {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        model: PathBuf,
        /// Comma-separated columns; default: all non-one-hot feature columns
        #[arg(long)]
        columns: Option<String>,
        /// Evaluation-row budget per pair; 0 = use every row
        #[arg(long, default_value_t = 0)]
        grid: usize,
        /// Null-distribution replicates; 0 = skip the null
        #[arg(long, default_value_t = 0)]
        nulls: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run a seeded ablation sweep and write the SweepResult CSV
    Simulate {
        /// One of: interaction, size, missing, binning, nuisance
        #[arg(long)]
        ablation: String,
        /// Comma-separated axis values; default depends on the ablation
        #[arg(long)]
        values: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        beta0: f64,
        #[arg(long, default_value_t = 1.0)]
        beta1: f64,
        #[arg(long, default_value_t = 0.5)]
        noise_mean: f64,
        #[arg(long, default_value_t = 0.1)]
        noise_sd: f64,
        /// Read --noise-sd as a variance instead of a standard deviation
        #[arg(long)]
        noise_is_variance: bool,
        #[arg(long, default_value_t = DEFAULT_REPLICATES)]
        replicates: usize,
        /// Nuisance correlation (nuisance ablation only)
        #[arg(long, default_value_t = DEFAULT_NUISANCE_RHO)]
        rho: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Fit several families on one shared split and compare them
    Compare {
        #[command(flatten)]
        data: DataArgs,
        /// Comma-separated families
        #[arg(long, default_value = "ols,ridge,lasso,krr,mlp")]
        families: String,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0.2)]
        test_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", error_class(&e));
            ExitCode::FAILURE
        }
    }
}

/// One diagnostic class per error family, for the single-line stderr report.
fn error_class(e: &Error) -> &'static str {
    match e {
        Error::Io(_) | Error::Csv(_) => "io",
        Error::Json(_) | Error::Spec(_) | Error::UnsupportedVersion { .. } => "spec",
        Error::Validation(_)
        | Error::NonNumeric { .. }
        | Error::MissingTarget(_)
        | Error::UnknownColumn(_)
        | Error::Dimension { .. }
        | Error::InvalidArgument(_) => "validation",
        Error::Numeric(_)
        | Error::Singular { .. }
        | Error::NoConvergence { .. }
        | Error::Diverged { .. }
        | Error::UndefinedH { .. } => "numeric",
    }
}

fn ensure_out(dir: &PathBuf) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

/// The saved model must have been fit on data of the same width.
fn check_schema(m: &FittedModel, d: &Dataset) -> Result<()> {
    if m.input_width() != d.p() {
        return Err(Error::Dimension {
            expected: m.input_width(),
            actual: d.p(),
        });
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fit {
            data,
            model_family,
            model,
            test_fraction,
            seed,
            out,
        } => cmd_fit(data, &model_family, model, test_fraction, seed, out),
        Command::Pd {
            data,
            model,
            column,
            grid,
            seed,
            out,
        } => cmd_pd_or_ice(data, model, &column, grid, seed, out, true),
        Command::Ice {
            data,
            model,
            column,
            grid,
            seed,
            out,
        } => cmd_pd_or_ice(data, model, &column, grid, seed, out, false),
        Command::Hstat {
            data,
            model,
            columns,
            grid,
            nulls,
            seed,
            out,
        } => cmd_hstat(data, model, columns, grid, nulls, seed, out),
        Command::Simulate {
            ablation,
            values,
            n,
            alpha,
            gamma,
            beta0,
            beta1,
            noise_mean,
            noise_sd,
            noise_is_variance,
            replicates,
            rho,
            seed,
            out,
        } => {
            let base = SimConfig {
                n: n.unwrap_or(0), // filled per ablation below
                beta0,
                beta1,
                alpha: alpha.unwrap_or(f64::NAN),
                gamma: gamma.unwrap_or(f64::NAN),
                noise_mean,
                noise_sd,
                noise_param_is_variance: noise_is_variance,
                seed,
            };
            cmd_simulate(&ablation, values, base, (n, alpha, gamma), replicates, rho, out)
        }
        Command::Compare {
            data,
            families,
            model,
            test_fraction,
            seed,
            out,
        } => cmd_compare(data, &families, model, test_fraction, seed, out),
    }
}

fn cmd_fit(
    data: DataArgs,
    model_family: &str,
    model: ModelArgs,
    test_fraction: f64,
    seed: u64,
    out: PathBuf,
) -> Result<()> {
    ensure_out(&out)?;
    let family = parse_family(model_family)?;
    let d = data.load()?;
    let split = d.split(test_fraction, seed)?;
    let cfg = model.config(family, seed);
    let m = fit(&d, &split, &cfg)?;

    let train = evaluate(&m, &d, &split.train)?;
    let test = evaluate(&m, &d, &split.test)?;
    println!(
        "train mae={} r2={}",
        fmt(train.mae),
        train.r2.map(fmt).unwrap_or_else(|| "na".into())
    );
    println!(
        "test mae={} r2={}",
        fmt(test.mae),
        test.r2.map(fmt).unwrap_or_else(|| "na".into())
    );
    if let FittedModel::Linear { coefficients, .. } = &m {
        let nonzero = coefficients.iter().filter(|&&b| b != 0.0).count();
        println!("nonzero coefficients: {nonzero}/{}", coefficients.len());
    }

    save_model(&m, out.join("model.json"))?;
    let rows = vec![
        vec![
            "train".into(),
            fmt(train.mae),
            train.r2.map(fmt).unwrap_or_default(),
        ],
        vec![
            "test".into(),
            fmt(test.mae),
            test.r2.map(fmt).unwrap_or_default(),
        ],
    ];
    write_csv_file(&out.join("metrics.csv"), "split,mae,r2", &rows)?;

    let mut man = Manifest::new("fit", seed);
    man.record_input(&data.data)?;
    man.record_input(&data.spec)?;
    man.write(&out)?;
    Ok(())
}

fn cmd_pd_or_ice(
    data: DataArgs,
    model_path: PathBuf,
    column: &str,
    grid: usize,
    seed: u64,
    out: PathBuf,
    pd_mode: bool,
) -> Result<()> {
    ensure_out(&out)?;
    let d = data.load()?;
    let m = load_model(&model_path)?;
    check_schema(&m, &d)?;
    let g = make_grid(&d, column, grid)?;
    let ice = compute_ice(&m, &d, &g)?;

    if pd_mode {
        let means = ice.column_means();
        let sds = ice.column_sds();
        let rows: Vec<Vec<String>> = (0..g.points.len())
            .map(|v| vec![fmt(g.points[v]), fmt(means[v]), fmt(sds[v])])
            .collect();
        write_csv_file(&out.join("pd.csv"), "grid_value,pd,ice_sd", &rows)?;
    } else {
        let mut rows = Vec::with_capacity(d.n() * g.points.len());
        for i in 0..d.n() {
            for v in 0..g.points.len() {
                rows.push(vec![
                    i.to_string(),
                    fmt(g.points[v]),
                    fmt(ice.curves[(i, v)]),
                ]);
            }
        }
        write_csv_file(&out.join("ice.csv"), "instance,grid_value,value", &rows)?;
    }

    let mut man = Manifest::new(if pd_mode { "pd" } else { "ice" }, seed);
    man.record_input(&data.data)?;
    man.record_input(&data.spec)?;
    man.record_input(&model_path)?;
    man.write(&out)?;
    Ok(())
}

fn cmd_hstat(
    data: DataArgs,
    model_path: PathBuf,
    columns: Option<String>,
    grid: usize,
    nulls: usize,
    seed: u64,
    out: PathBuf,
) -> Result<()> {
    ensure_out(&out)?;
    let d = data.load()?;
    let m = load_model(&model_path)?;
    check_schema(&m, &d)?;
    let cols: Vec<String> = match columns {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
        // default: every feature column outside one-hot groups
        None => d
            .specs
            .iter()
            .filter(|s| s.ohe_group.is_none())
            .map(|s| s.name.clone())
            .collect(),
    };
    let nulls_arg = if nulls > 0 { Some((nulls, seed)) } else { None };
    let report = h_matrix(&m, &d, &cols, grid, nulls_arg)?;

    let rows: Vec<Vec<String>> = report
        .pairs
        .iter()
        .map(|p| {
            let (q50, q95, q99, exceeds) = match (&p.null_quantiles, p.exceeds_null_95) {
                (Some(q), Some(e)) => (fmt(q.q50), fmt(q.q95), fmt(q.q99), e.to_string()),
                _ => (String::new(), String::new(), String::new(), String::new()),
            };
            vec![p.j.clone(), p.k.clone(), fmt(p.h), q50, q95, q99, exceeds]
        })
        .collect();
    write_csv_file(
        &out.join("hstat.csv"),
        "var_j,var_k,h,null_q50,null_q95,null_q99,exceeds_95",
        &rows,
    )?;

    let mut man = Manifest::new("hstat", seed);
    man.record_input(&data.data)?;
    man.record_input(&data.spec)?;
    man.record_input(&model_path)?;
    man.write(&out)?;
    Ok(())
}

fn cmd_simulate(
    ablation: &str,
    values: Option<String>,
    mut base: SimConfig,
    overrides: (Option<usize>, Option<f64>, Option<f64>),
    replicates: usize,
    rho: f64,
    out: PathBuf,
) -> Result<()> {
    ensure_out(&out)?;
    let (n_override, alpha_override, gamma_override) = overrides;

    // per-ablation defaults; the generator coefficients are unpublished so
    // these are fixed, documented choices (overridable by flags)
    let result: SweepResult = match ablation {
        "interaction" => {
            base.n = n_override.unwrap_or(2000);
            base.alpha = alpha_override.unwrap_or(0.0); // swept anyway
            base.gamma = gamma_override.unwrap_or(0.0);
            let alphas = match values {
                Some(v) => parse_list::<f64>(&v, "alpha")?,
                None => vec![0.0, 0.5, 1.0, 1.5, 2.0],
            };
            ablate_interaction(&base, &alphas, replicates)?
        }
        "size" => {
            base.n = n_override.unwrap_or(2000); // swept anyway
            base.alpha = alpha_override.unwrap_or(1.0);
            base.gamma = gamma_override.unwrap_or(0.5);
            let sizes = match values {
                Some(v) => parse_list::<usize>(&v, "size")?,
                None => vec![30, 100, 300, 1000, 3000],
            };
            ablate_size(&base, &sizes, replicates)?
        }
        "missing" => {
            base.n = n_override.unwrap_or(2000);
            base.alpha = alpha_override.unwrap_or(2.0);
            base.gamma = gamma_override.unwrap_or(0.5);
            let fractions = match values {
                Some(v) => parse_list::<f64>(&v, "fraction")?,
                None => vec![0.0, 0.3, 0.6, 0.9],
            };
            ablate_missing(&base, &fractions, replicates)?
        }
        "binning" => {
            base.n = n_override.unwrap_or(2000);
            base.alpha = alpha_override.unwrap_or(2.0);
            base.gamma = gamma_override.unwrap_or(0.5);
            let bins = match values {
                Some(v) => parse_list::<usize>(&v, "bin count")?,
                None => vec![2, 4, 8, 16, 32],
            };
            ablate_binning(&base, &bins, replicates)?
        }
        "nuisance" => {
            base.n = n_override.unwrap_or(200);
            base.alpha = alpha_override.unwrap_or(0.0);
            base.gamma = gamma_override.unwrap_or(0.0);
            let counts = match values {
                Some(v) => parse_list::<usize>(&v, "count")?,
                None => vec![0, 10, 20, 40],
            };
            ablate_nuisance(&base, &counts, rho, replicates)?
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown ablation {other:?}; expected interaction, size, missing, binning or nuisance"
            )))
        }
    };

    let mut rows = Vec::new();
    for point in &result.points {
        for (fi, family) in result.families.iter().enumerate() {
            rows.push(vec![
                fmt(point.axis_value),
                family.name().to_string(),
                fmt(point.mae_mean[fi]),
                fmt(point.mae_sd[fi]),
                point.n_seeds.to_string(),
            ]);
        }
    }
    write_csv_file(
        &out.join("sweep.csv"),
        "axis_value,family,mae_mean,mae_sd,n_seeds",
        &rows,
    )?;
    println!(
        "{} sweep: {} points x {} families, {} seeds each",
        result.axis,
        result.points.len(),
        result.families.len(),
        replicates
    );

    let man = Manifest::new("simulate", base.seed);
    man.write(&out)?;
    Ok(())
}

fn cmd_compare(
    data: DataArgs,
    families: &str,
    model: ModelArgs,
    test_fraction: f64,
    seed: u64,
    out: PathBuf,
) -> Result<()> {
    ensure_out(&out)?;
    let fams: Vec<Family> = families
        .split(',')
        .map(|s| parse_family(s.trim()))
        .collect::<Result<_>>()?;
    if fams.is_empty() {
        return Err(Error::InvalidArgument("no families given".into()));
    }
    let d = data.load()?;
    let split = d.split(test_fraction, seed)?;

    let mut rows = Vec::new();
    let mut test_preds: Vec<nalgebra::DVector<f64>> = Vec::new();
    for &family in &fams {
        let m = fit(&d, &split, &model.config(family, seed))?;
        let train = evaluate(&m, &d, &split.train)?;
        let test = evaluate(&m, &d, &split.test)?;
        println!(
            "{}: train mae={} test mae={}",
            family.name(),
            fmt(train.mae),
            fmt(test.mae)
        );
        rows.push(vec![
            family.name().to_string(),
            fmt(train.mae),
            train.r2.map(fmt).unwrap_or_default(),
            fmt(test.mae),
            test.r2.map(fmt).unwrap_or_default(),
        ]);
        test_preds.push(m.predict(&d.rows(&split.test))?);
    }
    write_csv_file(
        &out.join("compare.csv"),
        "family,train_mae,train_r2,test_mae,test_r2",
        &rows,
    )?;

    // pairwise Pearson correlation of held-out predictions
    let corr = |a: &nalgebra::DVector<f64>, b: &nalgebra::DVector<f64>| -> f64 {
        let ma = a.mean();
        let mb = b.mean();
        let ca = a.map(|v| v - ma);
        let cb = b.map(|v| v - mb);
        ca.dot(&cb) / (ca.norm() * cb.norm())
    };
    let header = std::iter::once("family".to_string())
        .chain(fams.iter().map(|f| f.name().to_string()))
        .collect::<Vec<_>>()
        .join(",");
    let corr_rows: Vec<Vec<String>> = fams
        .iter()
        .enumerate()
        .map(|(i, f)| {
            std::iter::once(f.name().to_string())
                .chain((0..fams.len()).map(|j| fmt(corr(&test_preds[i], &test_preds[j]))))
                .collect()
        })
        .collect();
    write_csv_file(&out.join("correlations.csv"), &header, &corr_rows)?;

    let mut man = Manifest::new("compare", seed);
    man.record_input(&data.data)?;
    man.record_input(&data.spec)?;
    man.write(&out)?;
    Ok(())
}

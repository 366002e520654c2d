//! Shared plumbing: dataset loading with the standard preprocessing
//! pipeline, model configuration from flags, and CSV emission.

use std::fmt::Write as _;
use std::path::Path;

use glassbox::data::Dataset;
use glassbox::models::{Bandwidth, Family, ModelConfig};
use glassbox::{Error, Result};

/// Preprocessing switches shared by every dataset-consuming subcommand.
#[derive(Debug, Clone, clap::Args)]
pub struct DataArgs {
    /// Input CSV file
    #[arg(long)]
    pub data: std::path::PathBuf,

    /// JSON column spec file
    #[arg(long)]
    pub spec: std::path::PathBuf,

    /// Skip standardization (default: non-binary features to mean 0, var 1)
    #[arg(long)]
    pub no_standardize: bool,

    /// Also standardize the target column
    #[arg(long)]
    pub standardize_target: bool,
}

impl DataArgs {
    /// load → declared transforms → mean imputation (when needed) →
    /// standardization.
    pub fn load(&self) -> Result<Dataset> {
        let mut d = glassbox::data::load_csv(&self.data, &self.spec)?;
        d = d.apply_all_transforms()?;
        if d.has_missing() {
            d = d.impute_mean()?;
        }
        if !self.no_standardize {
            d = d.standardize_with(self.standardize_target)?;
        }
        Ok(d)
    }
}

/// Model hyperparameter flags; defaults are per family.
#[derive(Debug, Clone, clap::Args)]
pub struct ModelArgs {
    /// Regularization strength (ridge, lasso, krr)
    #[arg(long)]
    pub lambda: Option<f64>,

    /// RBF kernel bandwidth (krr); omitted = median heuristic
    #[arg(long)]
    pub bandwidth: Option<f64>,

    /// Hidden layer width (mlp)
    #[arg(long, default_value_t = 10)]
    pub hidden_units: usize,

    /// Training epochs (mlp)
    #[arg(long, default_value_t = 2000)]
    pub epochs: usize,

    /// Gradient descent step size (mlp)
    #[arg(long, default_value_t = 0.05)]
    pub learning_rate: f64,

    /// L1 penalty on the hidden layer (mlp)
    #[arg(long, default_value_t = 1e-4)]
    pub l1_hidden: f64,
}

impl ModelArgs {
    pub fn config(&self, family: Family, seed: u64) -> ModelConfig {
        let cfg = match family {
            Family::Ols => ModelConfig::ols(),
            Family::Ridge => ModelConfig::ridge(self.lambda.unwrap_or(1.0)),
            Family::Lasso => ModelConfig::lasso(self.lambda.unwrap_or(0.05)),
            Family::Krr => ModelConfig::krr(
                self.lambda.unwrap_or(1e-3),
                match self.bandwidth {
                    Some(b) => Bandwidth::Fixed(b),
                    None => Bandwidth::MedianHeuristic,
                },
            ),
            Family::Mlp => ModelConfig::mlp(
                self.hidden_units,
                self.l1_hidden,
                self.epochs,
                self.learning_rate,
                seed,
            ),
        };
        cfg.with_seed(seed)
    }
}

/// Writes rows of already-formatted fields as CSV. All numeric fields use
/// Rust's shortest round-trip float formatting, so output is deterministic.
pub fn write_csv_file(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::new();
    writeln!(text, "{header}").expect("string write");
    for row in rows {
        writeln!(text, "{}", row.join(",")).expect("string write");
    }
    std::fs::write(path, text)?;
    Ok(())
}

pub fn fmt(v: f64) -> String {
    format!("{v}")
}

pub fn parse_family(s: &str) -> Result<Family> {
    s.parse()
}

/// Comma-separated list parser for numeric sweep values.
pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|_| Error::InvalidArgument(format!("bad {what} value {tok:?}")))
        })
        .collect()
}

//! Regression and model-agnostic interpretability toolkit for tabular data.
//!
//! The crate is organized around four subsystems:
//!
//! - [`data`] — dataset representation, CSV ingestion, variable typing,
//!   imputation, binning, transforms, standardization and splitting.
//! - [`models`] — five regression families (OLS, ridge, LASSO, kernel ridge,
//!   single-hidden-layer MLP) behind one fit/predict contract, plus metrics
//!   and JSON serialization.
//! - [`interpret`] — partial dependence, ICE curves, one-hot-group partial
//!   dependence, PD gradients, pairwise H-statistics and H null distributions.
//! - [`simulate`] — seeded synthetic-data generators and ablation sweeps
//!   comparing linear against non-linear model families.
//!
//! All randomness is driven by explicit integer seeds; every operation is
//! deterministic given its inputs.

pub mod data;
pub mod error;
pub mod interpret;
pub mod models;
pub mod seed;
pub mod simulate;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

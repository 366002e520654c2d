//! Model-agnostic interpretability.
//!
//! Partial dependence averages model predictions as one variable sweeps a
//! grid while all other variables stay at their observed values; ICE keeps
//! the per-instance curves whose pointwise mean is the PD. Pairwise
//! H-statistics measure interaction strength from one- and two-dimensional
//! partial dependence evaluated at the observed data points, and are judged
//! against a seeded null distribution built from an interaction-free
//! surrogate of the fitted model.

mod grid;
mod hstat;
mod pd;

pub use grid::{make_grid, Grid, GridKind};
pub use hstat::{
    compute_h_pairwise, h_matrix, h_null_distribution, HPair, HQuantiles, HReport,
};
pub use pd::{compute_ice, compute_pd, compute_pd_ohe, pd_gradient, IceResult, PdResult};

//! Dataset representation and preprocessing.
//!
//! A [`Dataset`] is an immutable numeric matrix with a target vector, ordered
//! per-column [`VariableSpec`]s and a missingness mask. All preprocessing
//! operations return new datasets; values are never mutated in place, so a
//! dataset can be shared read-only across concurrent workers.

mod csv_io;
mod dataset;
mod spec;

pub use csv_io::{load_csv, load_csv_with_spec, write_csv};
pub use dataset::{ColumnStats, Dataset, SplitIndices};
pub use spec::{ColumnRole, ColumnSpec, DataSpec, Transform, VariableKind, VariableSpec};

//! Pure statistical kernels shared by the validation steps.

mod chi2;
mod grid;
mod ks;
mod ngram;

pub use chi2::{scaled_chi_square, ChiSquare, CountVector};
pub use grid::{ecdf_grid, ecdf_rmse, kde_grid, scott_bandwidth, Bounds, DensityGrid, EcdfGrid, Grid};
pub use ks::{ks_statistic, Sample1D};
pub use ngram::{ngram_profile, profile_chi_square, NGram, NGramProfile, ProfileComparison};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("sample is empty")]
    EmptySample,
    #[error("input contains a non-finite value")]
    NonFiniteValue,
    #[error("validation counts are all zero")]
    DegenerateValidation,
    #[error("model counts are all zero")]
    DegenerateModel,
    #[error("model has no mass on any category present in the validation data")]
    DisjointSupport,
    #[error("invalid counts: {0}")]
    InvalidCounts(String),
    #[error("bounds are degenerate (require x_min < x_max and y_min < y_max, all finite)")]
    DegenerateBounds,
    #[error("no points supplied")]
    EmptyPoints,
    #[error("automatic bandwidth needs at least two points with non-zero spread on each axis")]
    TooFewPoints,
    #[error("bandwidth must be finite and positive")]
    InvalidBandwidth,
    #[error("grid shapes or bounds differ")]
    ShapeMismatch,
    #[error("grid must have at least one row and one column")]
    InvalidGridSize,
    #[error("n-gram input is empty or contains an empty sequence")]
    EmptyInput,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("profiles share no n-gram")]
    NoOverlap,
    #[error("profiles were built with different k or P")]
    ProfileMismatch,
}

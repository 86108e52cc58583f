//! Command-line pipeline over a flat-file workspace: corpus ETL, shot
//! segmentation, regressor training and scoring, smoothing, alignment,
//! analytics and SVG reports.

pub mod config;
mod error;
pub mod plot;
pub mod stages;
pub mod synth;
pub mod workspace;

pub use error::{CliError, CliResult, EXIT_INPUT, EXIT_VALIDATION};

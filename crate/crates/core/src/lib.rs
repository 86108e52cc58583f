//! Shot-level video memorability scoring and screenplay alignment.
//!
//! The crate is organised by pipeline stage:
//!
//! * [`corpus`] parses the word-level and scene-level screenplay corpora and
//!   merges them into one sentence-level [`corpus::EpisodeAnnotation`].
//! * [`shots`] reads and writes shot lists and carries a histogram-based
//!   fallback shot boundary detector.
//! * [`features`] defines the `MEMFEAT` frame feature format and picks
//!   representative frames per shot.
//! * [`regressor`] is a Bayesian ridge regressor fitted by evidence
//!   maximisation.
//! * [`signal`] builds chronological memorability signals and smooths them.
//! * [`alignment`] joins shots with the annotated corpus.
//! * [`analytics`] aggregates scores per character and per aspect.

pub mod alignment;
pub mod analytics;
pub mod corpus;
mod error;
pub mod features;
pub mod regressor;
pub mod shots;
pub mod signal;
mod tsv;

pub use error::{Error, Result};

/// Times are integer milliseconds from the start of an episode.
pub type Millis = u64;

pub use alignment::{align_shots, ShotContext};
pub use corpus::{Aspect, AspectSet, EpisodeAnnotation, Sentence};
pub use features::{FeatureTable, FrameFeature};
pub use regressor::{BrrModel, FitOptions, ShotScore, TrainingSet};
pub use shots::Shot;
pub use signal::{MemSignal, SmoothingConfig};

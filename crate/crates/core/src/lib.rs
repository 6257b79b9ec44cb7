//! Typologically diverse language sampling.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`frame`]: load typological feature data (wide CSV or CLDF long
//!    format), binarize multistate features, drop macro-languages and
//!    languages with too little coverage.
//! 2. [`distance`]: pairwise Euclidean distances under missing values,
//!    great-circle distances, min-max normalization and matrix persistence.
//! 3. [`sampling`]: greedy MaxSum and MaxMin selection, random, phylogenetic
//!    and convenience baselines, and seeded extension of an existing sample.
//! 4. [`metrics`]: MPD, feature value overlap, feature value inclusion and
//!    entropy, plus phylogeny audits and score summaries.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`, which is what the CLI uses.

pub mod cli;
pub mod distance;
pub mod error;
pub mod frame;
pub mod metrics;
pub mod sampling;
pub mod scalar;

pub use error::{Error, Result};
pub use frame::{BinarizationMap, FeatureMatrix, FeatureValue, LanguageRecord, RecordTable};
pub use sampling::{Method, Sample, SamplingFrame};
pub use scalar::Scalar;

/// Double precision distance matrix, the default everywhere.
pub type DistanceMatrix = distance::DistanceMatrix<f64>;
/// Single precision distance matrix.
pub type DistanceMatrix32 = distance::DistanceMatrix<f32>;
/// Diversity report over double precision distances.
pub type DiversityReport = metrics::DiversityReport<f64>;
/// Family coherence row with double precision overlap.
pub type FamilyCoherenceRow = metrics::FamilyCoherenceRow<f64>;
/// Score summary in double precision.
pub type ScoreSummary = metrics::ScoreSummary<f64>;

/// Version string embedded in provenance headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

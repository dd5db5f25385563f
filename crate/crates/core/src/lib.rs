//! Student attrition prediction from course grades.
//!
//! The pipeline encodes letter grades onto a symmetric numeric scale, clusters
//! students with K-means (choosing k by the Calinski-Harabasz index under
//! cross-validation), turns the clusters into a co-cluster classifier that is
//! compared against a logistic-regression baseline, and ranks the courses
//! whose per-cluster mean grades are furthest apart ("bottlenecks").
//!
//! Real registrar extracts can be read with [`ingest`]; [`synth`] generates
//! cohorts with a planted graduate / non-graduate structure.

pub mod cli;
pub mod cluster;
pub mod domain;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod insight;
pub mod matrix;
pub mod predict;
pub mod rng;
mod serde_util;
pub mod synth;

pub use error::{Error, Result};

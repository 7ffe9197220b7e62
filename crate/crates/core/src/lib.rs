//! Core library for depstrat: dependency-constraint classification,
//! ecosystem ingestion, specialization labeling, feature derivation, a
//! deterministic random-forest classifier, evaluation and interpretation
//! tooling, and strategy-evolution analysis.

pub mod config;
pub mod dataset;
pub mod ecosystem;
pub mod eval;
pub mod evolution;
pub mod features;
pub mod forest;
pub mod error;
pub mod graph;
pub mod labeling;
pub mod rng;
pub mod scalar;
pub mod semver;
pub mod synth;

pub use error::Error;

/// Scalar type used throughout the pipeline.
pub type Real = f64;

pub type Result<T> = std::result::Result<T, Error>;

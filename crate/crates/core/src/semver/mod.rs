//! Versions, constraint ranges, and update-strategy classification.

mod range;
mod strategy;
mod version;

pub use range::{parse_range, ConstraintIntervalSet, Interval};
pub use strategy::{admission_profile, classify, classify_text, AdmissionProfile, UpdateStrategy};
pub use version::{parse_version, Identifier, Version};

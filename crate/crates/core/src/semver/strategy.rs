//! Classifying constraints into update strategies.
//!
//! A constraint's strategy is the envelope of versions it lets the package
//! manager install automatically. Above 1.0.0: admitting a new major is
//! permissive, admitting a new minor (but no major) is balanced, and patch
//! freedom or a pin is restrictive. Below 1.0.0, where any minor may break,
//! only a pin counts as balanced; any freedom at all is permissive.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::range::{parse_range, ConstraintIntervalSet, Interval};
use super::version::Version;
use crate::error::Error;

/// How much automatic-update freedom a constraint grants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum UpdateStrategy {
    Balanced,
    Restrictive,
    Permissive,
}

impl UpdateStrategy {
    pub const ALL: [UpdateStrategy; 3] = [
        UpdateStrategy::Balanced,
        UpdateStrategy::Restrictive,
        UpdateStrategy::Permissive,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            UpdateStrategy::Balanced => "Balanced",
            UpdateStrategy::Restrictive => "Restrictive",
            UpdateStrategy::Permissive => "Permissive",
        }
    }
}

impl fmt::Display for UpdateStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UpdateStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "Balanced" => Ok(UpdateStrategy::Balanced),
            "Restrictive" => Ok(UpdateStrategy::Restrictive),
            "Permissive" => Ok(UpdateStrategy::Permissive),
            other => Err(Error::InvalidConfig(format!(
                "unknown update strategy {other:?}"
            ))),
        }
    }
}

/// Which kinds of upgrades beyond the minimum a constraint admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissionProfile {
    pub pinned: bool,
    pub admits_patch: bool,
    pub admits_minor: bool,
    pub admits_major: bool,
}

/// Probe the constraint against the patch/minor/major windows above its
/// minimum version. Window intersection is interval geometry on the set
/// itself, so gapped unions like "1.2.3 || 3.0.0" are handled exactly.
pub fn admission_profile(c: &ConstraintIntervalSet) -> AdmissionProfile {
    let (maj, min, pat) = c.min_version().triple();
    let patch_window = Interval::half_open(
        Version::new(maj, min, pat + 1),
        Version::new(maj, min + 1, 0),
    );
    let minor_window = Interval::half_open(
        Version::new(maj, min + 1, 0),
        Version::new(maj + 1, 0, 0),
    );
    let major_window = Interval::unbounded_above(Version::new(maj + 1, 0, 0), true);
    AdmissionProfile {
        pinned: c.intervals.len() == 1 && c.intervals[0].is_point(),
        admits_patch: c.intersects(&patch_window),
        admits_minor: c.intersects(&minor_window),
        admits_major: c.intersects(&major_window),
    }
}

/// Classify a parsed constraint. The pre/post-1.0.0 branch compares the
/// written lower bound itself against 1.0.0, so an exclusive bound like
/// ">0.9.9" stays on the pre-1.0.0 side even though its minimum admitted
/// version is 0.9.10.
pub fn classify(c: &ConstraintIntervalSet) -> UpdateStrategy {
    let profile = admission_profile(c);
    let post_1_0_0 = *c.first_lower_bound() >= Version::new(1, 0, 0);
    if post_1_0_0 {
        if profile.admits_major {
            UpdateStrategy::Permissive
        } else if profile.admits_minor {
            UpdateStrategy::Balanced
        } else {
            UpdateStrategy::Restrictive
        }
    } else if profile.pinned {
        UpdateStrategy::Balanced
    } else {
        UpdateStrategy::Permissive
    }
}

/// Parse and classify in one step.
pub fn classify_text(text: &str) -> Result<UpdateStrategy, Error> {
    Ok(classify(&parse_range(text)?))
}

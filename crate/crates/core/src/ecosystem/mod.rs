//! Ecosystem snapshots: packages, releases, and dependency edges.
//!
//! A snapshot is loaded from libraries.io-style CSV exports (or the
//! normalized newline-delimited JSON format), filtered down to the
//! population the analysis covers, and imputed so every numeric field is
//! concrete.

mod filters;
mod librariesio;
mod ndjson;

pub use filters::{apply_filters, impute_missing, FilterReport, ImputationReport};
pub use librariesio::{load_librariesio, LoadReport};
pub use ndjson::{read_ndjson, write_ndjson};

use std::collections::{BTreeMap, BTreeSet, HashSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::semver::Version;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DependencyKind {
    Runtime,
    Development,
    Optional,
}

impl DependencyKind {
    /// Map a kind string from an export; `None` for kinds we do not model
    /// (peer, test, build, ...), which callers count and drop.
    pub fn parse(s: &str) -> Option<DependencyKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "runtime" | "normal" => Some(DependencyKind::Runtime),
            "development" | "dev" => Some(DependencyKind::Development),
            "optional" => Some(DependencyKind::Optional),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            DependencyKind::Runtime => "runtime",
            DependencyKind::Development => "development",
            DependencyKind::Optional => "optional",
        }
    }
}

/// One published release of a package.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VersionRelease {
    pub version: Version,
    pub published_at: NaiveDate,
}

/// Repository-level metadata; `None` counts are unknown until imputation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepoMetadata {
    pub stars: Option<i64>,
    pub size_kb: Option<i64>,
    pub open_issues: Option<i64>,
    pub has_license_file: bool,
    pub has_readme: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackageRecord {
    pub name: String,
    pub created_at: NaiveDate,
    /// Sorted by publish date, then version precedence.
    pub versions: Vec<VersionRelease>,
    /// Highest non-prerelease version, falling back to highest overall.
    pub latest_version: Version,
    pub keywords: Vec<String>,
    pub has_description: bool,
    pub has_homepage: bool,
    pub license_text: String,
    pub sourcerank: i64,
    pub repo: Option<RepoMetadata>,
    pub dependent_repositories: i64,
}

impl PackageRecord {
    pub fn version_count(&self) -> usize {
        self.versions.len()
    }

    pub fn last_release_date(&self) -> NaiveDate {
        self.versions
            .iter()
            .map(|r| r.published_at)
            .max()
            .expect("versions non-empty")
    }

    /// Highest non-prerelease version, else highest overall.
    pub fn compute_latest(versions: &[VersionRelease]) -> Version {
        versions
            .iter()
            .filter(|r| !r.version.is_prerelease())
            .map(|r| &r.version)
            .max()
            .or_else(|| versions.iter().map(|r| &r.version).max())
            .expect("versions non-empty")
            .clone()
    }
}

/// A dependency declared by one version of one package on another package.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyEdge {
    pub dependent: String,
    pub dependent_version: Version,
    pub target: String,
    pub constraint_text: String,
    pub kind: DependencyKind,
}

/// The loaded ecosystem at a point in time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EcosystemSnapshot {
    pub snapshot_date: NaiveDate,
    pub packages: BTreeMap<String, PackageRecord>,
    /// All historical edges (every dependent version), canonically sorted.
    pub edges: Vec<DependencyEdge>,
}

impl EcosystemSnapshot {
    /// Canonical edge order: makes serialization and iteration stable.
    pub fn sort_edges(&mut self) {
        self.edges.sort_by(|a, b| {
            (&a.dependent, &a.dependent_version, &a.target, a.kind).cmp(&(
                &b.dependent,
                &b.dependent_version,
                &b.target,
                b.kind,
            ))
        });
    }

    /// Edges declared by each dependent's latest version, at most one per
    /// (dependent, target) pair.
    pub fn latest_edges(&self) -> Vec<&DependencyEdge> {
        let mut seen: HashSet<(&str, &str)> = HashSet::new();
        let mut out = Vec::new();
        for e in &self.edges {
            let Some(pkg) = self.packages.get(&e.dependent) else {
                continue;
            };
            if e.dependent_version != pkg.latest_version {
                continue;
            }
            if seen.insert((e.dependent.as_str(), e.target.as_str())) {
                out.push(e);
            }
        }
        out
    }

    /// Runtime latest edges grouped by target: who depends on each package
    /// right now, and with what constraint.
    pub fn runtime_dependents(&self) -> BTreeMap<&str, Vec<&DependencyEdge>> {
        let mut by_target: BTreeMap<&str, Vec<&DependencyEdge>> = BTreeMap::new();
        for e in self.latest_edges() {
            if e.kind == DependencyKind::Runtime {
                by_target.entry(e.target.as_str()).or_default().push(e);
            }
        }
        by_target
    }

    /// Packages with at least `min_dependents` runtime dependents — the
    /// population that receives specialization labels.
    pub fn labeled_population(&self, min_dependents: usize) -> BTreeSet<String> {
        self.runtime_dependents()
            .into_iter()
            .filter(|(_, deps)| deps.len() >= min_dependents)
            .map(|(name, _)| name.to_string())
            .collect()
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;
    use crate::semver::parse_version;

    pub fn date(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    pub fn package(name: &str, created: &str, releases: &[(&str, &str)]) -> PackageRecord {
        let mut versions: Vec<VersionRelease> = releases
            .iter()
            .map(|(v, d)| VersionRelease {
                version: parse_version(v).unwrap(),
                published_at: date(d),
            })
            .collect();
        versions.sort_by(|a, b| {
            a.published_at
                .cmp(&b.published_at)
                .then_with(|| a.version.cmp(&b.version))
        });
        let latest = PackageRecord::compute_latest(&versions);
        PackageRecord {
            name: name.to_string(),
            created_at: date(created),
            versions,
            latest_version: latest,
            keywords: Vec::new(),
            has_description: true,
            has_homepage: false,
            license_text: "MIT".to_string(),
            sourcerank: 5,
            repo: None,
            dependent_repositories: 0,
        }
    }

    pub fn edge(dependent: &str, version: &str, target: &str, constraint: &str) -> DependencyEdge {
        DependencyEdge {
            dependent: dependent.to_string(),
            dependent_version: parse_version(version).unwrap(),
            target: target.to_string(),
            constraint_text: constraint.to_string(),
            kind: DependencyKind::Runtime,
        }
    }

    pub fn snapshot(packages: Vec<PackageRecord>, edges: Vec<DependencyEdge>) -> EcosystemSnapshot {
        let mut s = EcosystemSnapshot {
            snapshot_date: date("2020-01-12"),
            packages: packages.into_iter().map(|p| (p.name.clone(), p)).collect(),
            edges,
        };
        s.sort_edges();
        s
    }
}

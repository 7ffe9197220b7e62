//! Loader for libraries.io open-data CSV exports.
//!
//! Three files describe an ecosystem: projects (one row per package),
//! versions (one row per release), and dependencies (one row per declared
//! dependency of one release). Only NPM-platform rows are used. Malformed
//! rows are counted and skipped, never fatal; a missing required column is.

use std::collections::BTreeMap;
use std::path::Path;

use chrono::{NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

use super::{
    DependencyEdge, DependencyKind, EcosystemSnapshot, PackageRecord, RepoMetadata,
    VersionRelease,
};
use crate::error::Error;
use crate::semver::parse_version;
use crate::Result;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub project_rows: usize,
    pub version_rows: usize,
    pub dependency_rows: usize,
    pub non_npm_rows: usize,
    pub malformed_rows: usize,
    pub duplicate_packages: usize,
    pub after_snapshot_versions: usize,
    pub packages_without_versions: usize,
    pub unknown_kind_edges: usize,
    pub self_edges_dropped: usize,
    pub dangling_edges_dropped: usize,
    pub packages_loaded: usize,
    pub edges_loaded: usize,
}

/// Header lookup: case-insensitive, first matching candidate wins.
struct Columns {
    headers: Vec<String>,
}

impl Columns {
    fn new(headers: &csv::StringRecord) -> Columns {
        Columns {
            headers: headers.iter().map(|h| h.trim().to_ascii_lowercase()).collect(),
        }
    }

    fn find(&self, candidates: &[&str]) -> Option<usize> {
        candidates.iter().find_map(|c| {
            let want = c.to_ascii_lowercase();
            self.headers.iter().position(|h| *h == want)
        })
    }

    fn require(&self, file: &Path, candidates: &[&str]) -> Result<usize> {
        self.find(candidates).ok_or_else(|| Error::SchemaMismatch {
            file: file.display().to_string(),
            detail: format!("missing required column {:?}", candidates[0]),
        })
    }
}

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.display().to_string()));
    }
    Ok(csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(Error::from)?)
}

fn field<'a>(record: &'a csv::StringRecord, idx: usize) -> &'a str {
    record.get(idx).unwrap_or("").trim()
}

fn opt_field<'a>(record: &'a csv::StringRecord, idx: Option<usize>) -> &'a str {
    idx.map(|i| field(record, i)).unwrap_or("")
}

/// Dates appear as "2018-03-14 12:53:24 UTC" or plain ISO dates.
fn parse_date(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    for fmt in ["%Y-%m-%d %H:%M:%S UTC", "%Y-%m-%d %H:%M:%S%.f UTC", "%Y-%m-%dT%H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt.date());
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}

fn parse_count(s: &str) -> Option<i64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    s.parse::<f64>().ok().map(|v| v as i64)
}

fn is_npm(platform: &str) -> bool {
    platform.eq_ignore_ascii_case("npm")
}

struct PendingPackage {
    record: PackageRecord,
}

/// Load a snapshot from the three export files. Versions published after
/// `snapshot_date` are ignored; packages left with no release are dropped.
pub fn load_librariesio(
    projects_csv: &Path,
    versions_csv: &Path,
    dependencies_csv: &Path,
    snapshot_date: NaiveDate,
) -> Result<(EcosystemSnapshot, LoadReport)> {
    let mut report = LoadReport::default();
    let mut pending: BTreeMap<String, PendingPackage> = BTreeMap::new();

    // projects
    {
        let mut reader = open_reader(projects_csv)?;
        let cols = Columns::new(reader.headers()?);
        let platform = cols.require(projects_csv, &["Platform"])?;
        let name = cols.require(projects_csv, &["Name", "Project Name"])?;
        let created = cols.require(projects_csv, &["Created Timestamp"])?;
        let description = cols.find(&["Description"]);
        let keywords = cols.find(&["Keywords"]);
        let homepage = cols.find(&["Homepage URL"]);
        let licenses = cols.find(&["Licenses", "License"]);
        let sourcerank = cols.find(&["SourceRank"]);
        let dependent_repos = cols.find(&["Dependent Repositories Count", "Dependent Repos Count"]);
        let repo_url = cols.find(&["Repository URL", "Repository Name with Owner"]);
        let stars = cols.find(&["Repository Stars Count", "Stars"]);
        let size = cols.find(&["Repository Size"]);
        let issues = cols.find(&["Repository Open Issues Count"]);
        let license_file = cols.find(&["Repository License filename"]);
        let readme_file = cols.find(&["Repository Readme filename"]);

        for row in reader.records() {
            let Ok(row) = row else {
                report.malformed_rows += 1;
                continue;
            };
            report.project_rows += 1;
            if !is_npm(field(&row, platform)) {
                report.non_npm_rows += 1;
                continue;
            }
            let pkg_name = field(&row, name).to_string();
            let Some(created_at) = parse_date(field(&row, created)) else {
                report.malformed_rows += 1;
                continue;
            };
            if pkg_name.is_empty() {
                report.malformed_rows += 1;
                continue;
            }
            if pending.contains_key(&pkg_name) {
                report.duplicate_packages += 1;
                continue;
            }

            let stars_v = parse_count(opt_field(&row, stars));
            let size_v = parse_count(opt_field(&row, size));
            let issues_v = parse_count(opt_field(&row, issues));
            let has_license_file = !opt_field(&row, license_file).is_empty();
            let has_readme = !opt_field(&row, readme_file).is_empty();
            let has_repo = !opt_field(&row, repo_url).is_empty()
                || stars_v.is_some()
                || size_v.is_some()
                || issues_v.is_some()
                || has_license_file
                || has_readme;
            let repo = has_repo.then_some(RepoMetadata {
                stars: stars_v,
                size_kb: size_v,
                open_issues: issues_v,
                has_license_file,
                has_readme,
            });

            let keyword_list: Vec<String> = opt_field(&row, keywords)
                .split(',')
                .map(|k| k.trim().to_string())
                .filter(|k| !k.is_empty())
                .collect();

            pending.insert(
                pkg_name.clone(),
                PendingPackage {
                    record: PackageRecord {
                        name: pkg_name,
                        created_at,
                        versions: Vec::new(),
                        latest_version: crate::semver::Version::new(0, 0, 0), // set at finalize
                        keywords: keyword_list,
                        has_description: !opt_field(&row, description).is_empty(),
                        has_homepage: !opt_field(&row, homepage).is_empty(),
                        license_text: opt_field(&row, licenses).to_string(),
                        sourcerank: parse_count(opt_field(&row, sourcerank)).unwrap_or(0),
                        repo,
                        dependent_repositories: parse_count(opt_field(&row, dependent_repos))
                            .unwrap_or(0),
                    },
                },
            );
        }
    }

    // versions
    {
        let mut reader = open_reader(versions_csv)?;
        let cols = Columns::new(reader.headers()?);
        let platform = cols.require(versions_csv, &["Platform"])?;
        let name = cols.require(versions_csv, &["Project Name", "Name"])?;
        let number = cols.require(versions_csv, &["Number", "Version Number"])?;
        let published = cols.require(versions_csv, &["Published Timestamp"])?;

        for row in reader.records() {
            let Ok(row) = row else {
                report.malformed_rows += 1;
                continue;
            };
            report.version_rows += 1;
            if !is_npm(field(&row, platform)) {
                report.non_npm_rows += 1;
                continue;
            }
            let Some(pkg) = pending.get_mut(field(&row, name)) else {
                continue; // version of a package outside the project export
            };
            let Ok(version) = parse_version(field(&row, number)) else {
                report.malformed_rows += 1;
                continue;
            };
            let Some(published_at) = parse_date(field(&row, published)) else {
                report.malformed_rows += 1;
                continue;
            };
            if published_at > snapshot_date {
                report.after_snapshot_versions += 1;
                continue;
            }
            pkg.record.versions.push(VersionRelease {
                version,
                published_at,
            });
        }
    }

    // finalize packages: sort releases, compute latest, keep the created
    // date consistent with the earliest publish
    let mut packages: BTreeMap<String, PackageRecord> = BTreeMap::new();
    for (name, mut p) in pending {
        if p.record.versions.is_empty() {
            report.packages_without_versions += 1;
            continue;
        }
        p.record.versions.sort_by(|a, b| {
            a.published_at
                .cmp(&b.published_at)
                .then_with(|| a.version.cmp(&b.version))
        });
        let earliest = p.record.versions[0].published_at;
        if p.record.created_at > earliest {
            p.record.created_at = earliest;
        }
        p.record.latest_version = PackageRecord::compute_latest(&p.record.versions);
        packages.insert(name, p.record);
    }

    // dependencies
    let mut edges: Vec<DependencyEdge> = Vec::new();
    {
        let mut reader = open_reader(dependencies_csv)?;
        let cols = Columns::new(reader.headers()?);
        let platform = cols.require(dependencies_csv, &["Platform"])?;
        let name = cols.require(dependencies_csv, &["Project Name", "Name"])?;
        let version = cols.require(dependencies_csv, &["Version Number", "Number"])?;
        let dep_name = cols.require(dependencies_csv, &["Dependency Name"])?;
        let kind = cols.require(dependencies_csv, &["Dependency Kind"])?;
        let requirements = cols.require(dependencies_csv, &["Dependency Requirements"])?;
        let optional = cols.find(&["Optional Dependency"]);

        for row in reader.records() {
            let Ok(row) = row else {
                report.malformed_rows += 1;
                continue;
            };
            report.dependency_rows += 1;
            if !is_npm(field(&row, platform)) {
                report.non_npm_rows += 1;
                continue;
            }
            let dependent = field(&row, name);
            let target = field(&row, dep_name);
            let Ok(dependent_version) = parse_version(field(&row, version)) else {
                report.malformed_rows += 1;
                continue;
            };
            let mut edge_kind = match DependencyKind::parse(field(&row, kind)) {
                Some(k) => k,
                None => {
                    report.unknown_kind_edges += 1;
                    continue;
                }
            };
            if opt_field(&row, optional).eq_ignore_ascii_case("true") {
                edge_kind = DependencyKind::Optional;
            }
            if dependent == target {
                report.self_edges_dropped += 1;
                continue;
            }
            if !packages.contains_key(dependent) || !packages.contains_key(target) {
                report.dangling_edges_dropped += 1;
                continue;
            }
            edges.push(DependencyEdge {
                dependent: dependent.to_string(),
                dependent_version,
                target: target.to_string(),
                constraint_text: field(&row, requirements).to_string(),
                kind: edge_kind,
            });
        }
    }

    report.packages_loaded = packages.len();
    report.edges_loaded = edges.len();

    let mut snapshot = EcosystemSnapshot {
        snapshot_date,
        packages,
        edges,
    };
    snapshot.sort_edges();
    Ok((snapshot, report))
}

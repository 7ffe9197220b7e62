//! Normalized snapshot format: newline-delimited JSON, one record per line.
//!
//! Line 1 is a header carrying the snapshot date and provenance; package
//! lines follow in name order, then edge lines in canonical edge order.
//! Writing the same snapshot twice produces identical bytes, and a
//! write → read → write cycle is a fixpoint.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{
    DependencyEdge, DependencyKind, EcosystemSnapshot, PackageRecord, RepoMetadata,
    VersionRelease,
};
use crate::config::{atomic_write, RunConfig};
use crate::error::Error;
use crate::semver::parse_version;
use crate::Result;

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line {
    Header {
        format_version: u32,
        snapshot_date: NaiveDate,
        config_hash: String,
        seed: u64,
    },
    Package(PackageLine),
    Edge(EdgeLine),
}

#[derive(Serialize, Deserialize)]
struct ReleaseLine {
    v: String,
    d: NaiveDate,
}

#[derive(Serialize, Deserialize)]
struct RepoLine {
    stars: Option<i64>,
    size_kb: Option<i64>,
    open_issues: Option<i64>,
    has_license_file: bool,
    has_readme: bool,
}

#[derive(Serialize, Deserialize)]
struct PackageLine {
    name: String,
    created_at: NaiveDate,
    versions: Vec<ReleaseLine>,
    latest_version: String,
    keywords: Vec<String>,
    has_description: bool,
    has_homepage: bool,
    license: String,
    sourcerank: i64,
    repo: Option<RepoLine>,
    dependent_repositories: i64,
}

#[derive(Serialize, Deserialize)]
struct EdgeLine {
    dependent: String,
    dependent_version: String,
    target: String,
    constraint: String,
    kind: DependencyKind,
}

fn to_package_line(p: &PackageRecord) -> PackageLine {
    PackageLine {
        name: p.name.clone(),
        created_at: p.created_at,
        versions: p
            .versions
            .iter()
            .map(|r| ReleaseLine {
                v: r.version.to_string(),
                d: r.published_at,
            })
            .collect(),
        latest_version: p.latest_version.to_string(),
        keywords: p.keywords.clone(),
        has_description: p.has_description,
        has_homepage: p.has_homepage,
        license: p.license_text.clone(),
        sourcerank: p.sourcerank,
        repo: p.repo.as_ref().map(|r| RepoLine {
            stars: r.stars,
            size_kb: r.size_kb,
            open_issues: r.open_issues,
            has_license_file: r.has_license_file,
            has_readme: r.has_readme,
        }),
        dependent_repositories: p.dependent_repositories,
    }
}

fn from_package_line(path: &Path, line: PackageLine) -> Result<PackageRecord> {
    let schema_err = |detail: String| Error::SchemaMismatch {
        file: path.display().to_string(),
        detail,
    };
    let versions = line
        .versions
        .into_iter()
        .map(|r| {
            Ok(VersionRelease {
                version: parse_version(&r.v)
                    .map_err(|e| schema_err(format!("package {}: {e}", line.name)))?,
                published_at: r.d,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if versions.is_empty() {
        return Err(schema_err(format!("package {} has no versions", line.name)));
    }
    Ok(PackageRecord {
        latest_version: parse_version(&line.latest_version)
            .map_err(|e| schema_err(format!("package {}: {e}", line.name)))?,
        name: line.name,
        created_at: line.created_at,
        versions,
        keywords: line.keywords,
        has_description: line.has_description,
        has_homepage: line.has_homepage,
        license_text: line.license,
        sourcerank: line.sourcerank,
        repo: line.repo.map(|r| RepoMetadata {
            stars: r.stars,
            size_kb: r.size_kb,
            open_issues: r.open_issues,
            has_license_file: r.has_license_file,
            has_readme: r.has_readme,
        }),
        dependent_repositories: line.dependent_repositories,
    })
}

/// Serialize a snapshot to the normalized format, atomically.
pub fn write_ndjson(path: &Path, snapshot: &EcosystemSnapshot, config: &RunConfig) -> Result<()> {
    let mut out = String::new();
    let header = Line::Header {
        format_version: 1,
        snapshot_date: snapshot.snapshot_date,
        config_hash: config.content_hash(),
        seed: config.seed,
    };
    out.push_str(&serde_json::to_string(&header)?);
    out.push('\n');
    for p in snapshot.packages.values() {
        out.push_str(&serde_json::to_string(&Line::Package(to_package_line(p)))?);
        out.push('\n');
    }
    for e in &snapshot.edges {
        let line = Line::Edge(EdgeLine {
            dependent: e.dependent.clone(),
            dependent_version: e.dependent_version.to_string(),
            target: e.target.clone(),
            constraint: e.constraint_text.clone(),
            kind: e.kind,
        });
        out.push_str(&serde_json::to_string(&line)?);
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

/// Read a snapshot back from the normalized format.
pub fn read_ndjson(path: &Path) -> Result<EcosystemSnapshot> {
    if !path.exists() {
        return Err(Error::MissingFile(path.display().to_string()));
    }
    let content = fs::read_to_string(path)?;
    let mut snapshot_date: Option<NaiveDate> = None;
    let mut packages: BTreeMap<String, PackageRecord> = BTreeMap::new();
    let mut edges: Vec<DependencyEdge> = Vec::new();
    for (i, raw) in content.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let line: Line = serde_json::from_str(raw).map_err(|e| Error::SchemaMismatch {
            file: path.display().to_string(),
            detail: format!("line {}: {e}", i + 1),
        })?;
        match line {
            Line::Header {
                snapshot_date: date,
                ..
            } => snapshot_date = Some(date),
            Line::Package(p) => {
                let record = from_package_line(path, p)?;
                packages.insert(record.name.clone(), record);
            }
            Line::Edge(e) => edges.push(DependencyEdge {
                dependent_version: parse_version(&e.dependent_version).map_err(|err| {
                    Error::SchemaMismatch {
                        file: path.display().to_string(),
                        detail: format!("edge line {}: {err}", i + 1),
                    }
                })?,
                dependent: e.dependent,
                target: e.target,
                constraint_text: e.constraint,
                kind: e.kind,
            }),
        }
    }
    let snapshot_date = snapshot_date.ok_or_else(|| Error::SchemaMismatch {
        file: path.display().to_string(),
        detail: "missing header line".to_string(),
    })?;
    Ok(EcosystemSnapshot {
        snapshot_date,
        packages,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let mut lib = package(
            "lib",
            "2015-01-01",
            &[("1.0.0", "2015-01-01"), ("1.1.0-rc.1", "2016-01-01")],
        );
        lib.keywords = vec!["http".into(), "client".into()];
        lib.repo = Some(RepoMetadata {
            stars: Some(7),
            size_kb: None,
            open_issues: Some(0),
            has_license_file: true,
            has_readme: false,
        });
        let s = snapshot(
            vec![lib, package("x", "2016-01-01", &[("2.0.0", "2016-01-01")])],
            vec![edge("x", "2.0.0", "lib", "^1.0.0")],
        );
        let config = RunConfig::default();

        let path = dir.path().join("eco.ndjson");
        write_ndjson(&path, &s, &config).unwrap();
        let first_bytes = fs::read(&path).unwrap();

        let reloaded = read_ndjson(&path).unwrap();
        assert_eq!(reloaded, s);

        let path2 = dir.path().join("eco2.ndjson");
        write_ndjson(&path2, &reloaded, &config).unwrap();
        assert_eq!(fs::read(&path2).unwrap(), first_bytes);
    }

    #[test]
    fn header_is_required() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.ndjson");
        fs::write(&path, "{\"type\":\"edge\",\"dependent\":\"a\",\"dependent_version\":\"1.0.0\",\"target\":\"b\",\"constraint\":\"*\",\"kind\":\"runtime\"}\n").unwrap();
        assert!(matches!(
            read_ndjson(&path),
            Err(Error::SchemaMismatch { .. })
        ));
    }
}

//! Package characteristics used by the classifier.
//!
//! Every package is summarized as a fixed-order numeric vector combining
//! graph position (dependency/dependent counts, transitive reach),
//! release cadence, documentation and repository signals, and a keyword
//! domain cluster. Boolean traits are encoded 0/1, licenses through a
//! deterministic dictionary, and the domain through k-means over keyword
//! groups.

pub mod correlation;
pub mod domain;

use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate};
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::ecosystem::{EcosystemSnapshot, PackageRecord};
use crate::graph::DepGraph;
use crate::labeling::LabelRow;
use crate::semver::Version;
use crate::{Real, Result};

pub use correlation::{audit, pearson, CorrelationReport};
pub use domain::{fit_domain_model, fit_domain_model_with, DomainModel, DomainParams};

/// Column order of the feature matrix. Every producer and consumer of
/// feature vectors indexes against this list.
pub const FEATURE_NAMES: [&str; 19] = [
    "dependency_count",
    "transitive_dependency_count",
    "dependent_count",
    "version_frequency",
    "age_months",
    "has_description",
    "has_keywords",
    "has_homepage",
    "license_code",
    "sourcerank",
    "release_status",
    "days_since_last_release",
    "dependent_repositories",
    "repository_size_kb",
    "repository_open_issues",
    "repository_stars",
    "has_repo_license",
    "has_repo_readme",
    "domain",
];

/// Whole calendar months between two dates; days within the month are
/// ignored, so Nov 30 → Jan 1 counts as two months.
pub fn age_months(created: NaiveDate, snapshot: NaiveDate) -> i64 {
    let years = snapshot.year() as i64 - created.year() as i64;
    let months = snapshot.month() as i64 - created.month() as i64;
    (years * 12 + months).max(0)
}

/// Releases per month of age; a package created in the snapshot month
/// reports its raw release count.
pub fn version_frequency(version_count: usize, age_months: i64) -> Real {
    if age_months == 0 {
        version_count as Real
    } else {
        version_count as Real / age_months as Real
    }
}

fn bool_flag(b: bool) -> Real {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Dictionary codes for license strings: distinct non-empty trimmed texts
/// sorted lexicographically get 1..n; the empty license is 0.
pub fn license_codes(s: &EcosystemSnapshot) -> BTreeMap<String, i64> {
    let distinct: std::collections::BTreeSet<&str> = s
        .packages
        .values()
        .map(|p| p.license_text.trim())
        .filter(|t| !t.is_empty())
        .collect();
    distinct
        .into_iter()
        .enumerate()
        .map(|(i, t)| (t.to_string(), i as i64 + 1))
        .collect()
}

fn feature_vector(
    p: &PackageRecord,
    snapshot_date: NaiveDate,
    dependency_count: usize,
    transitive_dependencies: usize,
    dependent_count: usize,
    licenses: &BTreeMap<String, i64>,
    domains: &DomainModel,
) -> Vec<Real> {
    let age = age_months(p.created_at, snapshot_date);
    let last = p.last_release_date();
    let days_since_last = snapshot_date.signed_duration_since(last).num_days().max(0);
    let release_status = p.latest_version >= Version::new(1, 0, 0);
    let license_code = licenses
        .get(p.license_text.trim())
        .copied()
        .unwrap_or(0);
    let repo = p.repo.as_ref();

    vec![
        dependency_count as Real,
        transitive_dependencies as Real,
        dependent_count as Real,
        version_frequency(p.version_count(), age),
        age as Real,
        bool_flag(p.has_description),
        bool_flag(!p.keywords.is_empty()),
        bool_flag(p.has_homepage),
        license_code as Real,
        p.sourcerank as Real,
        bool_flag(release_status),
        days_since_last as Real,
        p.dependent_repositories as Real,
        repo.and_then(|r| r.size_kb).unwrap_or(0) as Real,
        repo.and_then(|r| r.open_issues).unwrap_or(0) as Real,
        repo.and_then(|r| r.stars).unwrap_or(0) as Real,
        bool_flag(repo.map(|r| r.has_license_file).unwrap_or(false)),
        bool_flag(repo.map(|r| r.has_readme).unwrap_or(false)),
        domains.assign(&p.keywords) as Real,
    ]
}

/// Derive the full feature vector for every package in the snapshot.
/// Expects a filtered, imputed snapshot and a graph built from it.
pub fn derive_features(
    s: &EcosystemSnapshot,
    graph: &DepGraph,
    domains: &DomainModel,
) -> Result<BTreeMap<String, Vec<Real>>> {
    let licenses = license_codes(s);
    let names: Vec<&String> = s.packages.keys().collect();
    let reach: Vec<(usize, usize)> = names
        .par_iter()
        .map(|name| graph.transitive_counts(name))
        .collect::<Result<_>>()?;

    let mut out = BTreeMap::new();
    for (name, (_, transitive_deps)) in names.iter().zip(reach) {
        let p = &s.packages[*name];
        let v = feature_vector(
            p,
            s.snapshot_date,
            graph.dependency_count(name)?,
            transitive_deps,
            graph.dependent_count(name)?,
            &licenses,
            domains,
        );
        out.insert((*name).clone(), v);
    }
    Ok(out)
}

/// Join feature vectors with labels into a modelling dataset; rows are the
/// labelled packages in name order.
pub fn assemble_dataset(
    features: &BTreeMap<String, Vec<Real>>,
    labels: &BTreeMap<String, LabelRow>,
) -> Dataset {
    let mut packages = Vec::new();
    let mut rows = Vec::new();
    let mut classes = Vec::new();
    for (name, row) in labels {
        if let Some(v) = features.get(name) {
            packages.push(name.clone());
            rows.push(v.clone());
            classes.push(row.label);
        }
    }
    Dataset {
        feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        packages,
        rows,
        labels: classes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecosystem::test_support::*;
    use crate::labeling::label_all;

    fn flat_domains() -> DomainModel {
        DomainModel::single_domain(0)
    }

    #[test]
    fn age_is_a_calendar_month_difference() {
        let d = |s: &str| date(s);
        assert_eq!(age_months(d("2019-11-30"), d("2020-01-01")), 2);
        assert_eq!(age_months(d("2020-01-01"), d("2020-01-31")), 0);
        assert_eq!(age_months(d("2015-01-12"), d("2020-01-12")), 60);
    }

    #[test]
    fn version_frequency_handles_new_packages() {
        assert_eq!(version_frequency(10, 5), 2.0);
        assert_eq!(version_frequency(4, 0), 4.0);
        assert_eq!(version_frequency(3, 2), 1.5);
    }

    #[test]
    fn license_dictionary_is_sorted_and_one_based() {
        let mut a = package("a", "2015-01-01", &[("1.0.0", "2015-01-01")]);
        a.license_text = "MIT".into();
        let mut b = package("b", "2015-01-01", &[("1.0.0", "2015-01-01")]);
        b.license_text = "Apache-2.0".into();
        let mut c = package("c", "2015-01-01", &[("1.0.0", "2015-01-01")]);
        c.license_text = String::new();
        let s = snapshot(vec![a, b, c], vec![]);
        let codes = license_codes(&s);
        assert_eq!(codes.get("Apache-2.0"), Some(&1));
        assert_eq!(codes.get("MIT"), Some(&2));
        assert_eq!(codes.get(""), None);
    }

    fn sample_snapshot() -> EcosystemSnapshot {
        // c depends on b depends on a; d also depends on a
        let a = package("a", "2019-07-20", &[("0.9.0", "2019-08-01"), ("1.2.0", "2019-12-13")]);
        let b = package("b", "2019-01-12", &[("0.1.0", "2019-02-01")]);
        let c = package("c", "2019-01-01", &[("1.0.0", "2019-01-02")]);
        let d = package("d", "2019-01-01", &[("2.0.0", "2019-01-02")]);
        snapshot(
            vec![a, b, c, d],
            vec![
                edge("b", "0.1.0", "a", "^1.0.0"),
                edge("c", "1.0.0", "b", "~0.1.0"),
                edge("d", "2.0.0", "a", "1.2.0"),
            ],
        )
    }

    #[test]
    fn vectors_follow_the_declared_column_order() {
        let s = sample_snapshot();
        let g = DepGraph::build(&s);
        let features = derive_features(&s, &g, &flat_domains()).unwrap();
        assert_eq!(features.len(), 4);

        let idx = |name: &str| FEATURE_NAMES.iter().position(|&n| n == name).unwrap();
        let a = &features["a"];
        assert_eq!(a.len(), FEATURE_NAMES.len());
        assert_eq!(a[idx("dependency_count")], 0.0);
        assert_eq!(a[idx("dependent_count")], 2.0);
        assert_eq!(a[idx("transitive_dependency_count")], 0.0);
        // snapshot date 2020-01-12, created 2019-07-20 → 6 months, 2 versions
        assert_eq!(a[idx("age_months")], 6.0);
        assert_eq!(a[idx("version_frequency")], 2.0 / 6.0);
        // latest 1.2.0 published 2019-12-13 → 30 days before snapshot
        assert_eq!(a[idx("days_since_last_release")], 30.0);
        assert_eq!(a[idx("release_status")], 1.0);
        assert_eq!(a[idx("domain")], 1.0);

        let b = &features["b"];
        assert_eq!(b[idx("dependency_count")], 1.0);
        assert_eq!(b[idx("dependent_count")], 1.0);
        assert_eq!(b[idx("release_status")], 0.0);

        let c = &features["c"];
        // c → b → a
        assert_eq!(c[idx("transitive_dependency_count")], 2.0);
    }

    #[test]
    fn prerelease_latest_does_not_count_as_released() {
        let p = package("x", "2019-01-01", &[("1.0.0-rc.1", "2019-02-01")]);
        let s = snapshot(vec![p], vec![]);
        let g = DepGraph::build(&s);
        let features = derive_features(&s, &g, &flat_domains()).unwrap();
        let idx = FEATURE_NAMES
            .iter()
            .position(|&n| n == "release_status")
            .unwrap();
        assert_eq!(features["x"][idx], 0.0);
    }

    #[test]
    fn dataset_rows_are_labelled_packages_in_name_order() {
        // give "a" two dependents so it earns a label
        let s = sample_snapshot();
        let labels = label_all(&s, 0.5).unwrap();
        assert!(labels.contains_key("a"));
        let g = DepGraph::build(&s);
        let features = derive_features(&s, &g, &flat_domains()).unwrap();
        let ds = assemble_dataset(&features, &labels);
        assert_eq!(ds.packages, vec!["a".to_string()]);
        assert_eq!(ds.rows.len(), 1);
        assert_eq!(ds.feature_names.len(), 19);
        assert_eq!(ds.labels.len(), 1);
    }
}

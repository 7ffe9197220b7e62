//! Deterministic synthetic data for demos and end-to-end checks.
//!
//! Two generators: a planted-signal feature dataset where release status,
//! dependent count, and age decide the label by a crisp rule (everything
//! else is noise), and a small registry-export fixture — three CSVs in the
//! ingestion schema — whose dependents' constraints are drawn to give most
//! targets a clear majority strategy. Both are pure functions of their
//! seed.

use std::path::Path;

use chrono::NaiveDate;
use rand::Rng;

use crate::dataset::Dataset;
use crate::features::FEATURE_NAMES;
use crate::labeling::LabelClass;
use crate::rng::stream;
use crate::{Real, Result};

/// The planted rule: pre-1.0.0 packages are Permissive, barely-used ones
/// Unspecialized, old ones Restrictive, young popular ones Balanced.
pub fn planted_label(release_status: Real, dependent_count: Real, age_months: Real) -> LabelClass {
    if release_status == 0.0 {
        LabelClass::Permissive
    } else if dependent_count < 5.0 {
        LabelClass::Unspecialized
    } else if age_months > 48.0 {
        LabelClass::Restrictive
    } else {
        LabelClass::Balanced
    }
}

/// Feature matrix of `n_rows` synthetic packages whose labels follow
/// `planted_label` exactly; the remaining sixteen columns are noise, and
/// `has_repo_license` is constant so at least one feature is provably
/// never used by a model.
pub fn planted_dataset(n_rows: usize, seed: u64) -> Dataset {
    let mut rng = stream(seed, &["planted"]);
    let idx = |name: &str| {
        FEATURE_NAMES
            .iter()
            .position(|&n| n == name)
            .expect("known feature")
    };

    let mut packages = Vec::with_capacity(n_rows);
    let mut rows = Vec::with_capacity(n_rows);
    let mut labels = Vec::with_capacity(n_rows);
    for i in 0..n_rows {
        let release_status = if rng.gen_bool(0.6) { 1.0 } else { 0.0 };
        let dependent_count = if rng.gen_bool(0.2) {
            rng.gen_range(0..5) as Real
        } else {
            rng.gen_range(5..2000) as Real
        };
        let age_months = rng.gen_range(1..=96) as Real;

        let mut row = vec![0.0 as Real; FEATURE_NAMES.len()];
        row[idx("dependency_count")] = rng.gen_range(0..50) as Real;
        row[idx("transitive_dependency_count")] = rng.gen_range(0..250) as Real;
        row[idx("dependent_count")] = dependent_count;
        row[idx("version_frequency")] = rng.gen_range(0.1..5.0);
        row[idx("age_months")] = age_months;
        row[idx("has_description")] = rng.gen_bool(0.7) as u8 as Real;
        row[idx("has_keywords")] = rng.gen_bool(0.7) as u8 as Real;
        row[idx("has_homepage")] = rng.gen_bool(0.6) as u8 as Real;
        row[idx("license_code")] = rng.gen_range(0..30) as Real;
        row[idx("sourcerank")] = rng.gen_range(0..30) as Real;
        row[idx("release_status")] = release_status;
        row[idx("days_since_last_release")] = rng.gen_range(0..1000) as Real;
        row[idx("dependent_repositories")] = rng.gen_range(0..10_000) as Real;
        row[idx("repository_size_kb")] = rng.gen_range(0..100_000) as Real;
        row[idx("repository_open_issues")] = rng.gen_range(0..500) as Real;
        row[idx("repository_stars")] = rng.gen_range(0..50_000) as Real;
        row[idx("has_repo_license")] = 1.0; // constant by design
        row[idx("has_repo_readme")] = rng.gen_bool(0.8) as u8 as Real;
        row[idx("domain")] = rng.gen_range(1..=10) as Real;

        packages.push(format!("synth-{i:05}"));
        labels.push(planted_label(release_status, dependent_count, age_months));
        rows.push(row);
    }

    Dataset {
        feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        packages,
        rows,
        labels,
    }
}

const KEYWORD_FAMILIES: [[&str; 5]; 3] = [
    ["react", "component", "ui", "web", "frontend"],
    ["server", "http", "api", "rest", "backend"],
    ["test", "mock", "assert", "runner", "coverage"],
];

fn timestamp(date: NaiveDate) -> String {
    format!("{date} 12:00:00 UTC")
}

fn date_in(rng: &mut impl Rng, year_lo: i32, year_hi: i32) -> NaiveDate {
    let year = rng.gen_range(year_lo..=year_hi);
    let month = rng.gen_range(1..=12);
    let day = rng.gen_range(1..=28);
    NaiveDate::from_ymd_opt(year, month, day).expect("day <= 28 always valid")
}

struct FixturePackage {
    name: String,
    created: NaiveDate,
    versions: Vec<(String, NaiveDate)>,
    keywords: String,
    post_1_0_0: bool,
}

/// Write a small three-file registry export (projects, versions,
/// dependencies) under `dir`. The first `n_targets` packages receive
/// enough dependents for labeling, each crowd leaning 90% toward a
/// strategy implied by the target's release status; spam packages, non-npm
/// rows, dev/optional edges, and a few unparseable constraints are mixed
/// in so ingestion filters have work to do.
pub fn write_ecosystem_fixture(
    dir: &Path,
    n_packages: usize,
    n_targets: usize,
    seed: u64,
) -> Result<()> {
    assert!(n_targets < n_packages);
    std::fs::create_dir_all(dir)?;
    let mut rng = stream(seed, &["fixture"]);

    let mut packages = Vec::with_capacity(n_packages);
    for i in 0..n_packages {
        let created = date_in(&mut rng, 2013, 2017);
        let post_1_0_0 = rng.gen_bool(0.7);
        let n_versions = rng.gen_range(1..=4);
        let mut versions = Vec::new();
        let mut d = created;
        for v in 0..n_versions {
            d += chrono::Duration::days(rng.gen_range(30..300));
            let number = if post_1_0_0 {
                format!("{}.{}.0", v + 1, rng.gen_range(0..4))
            } else {
                format!("0.{}.{}", v + 1, rng.gen_range(0..4))
            };
            versions.push((number, d));
        }
        let family = KEYWORD_FAMILIES[i % KEYWORD_FAMILIES.len()];
        let n_kw = rng.gen_range(2..=5);
        let keywords = family[..n_kw].join(",");
        packages.push(FixturePackage {
            name: format!("pkg-{i:04}"),
            created,
            versions,
            keywords,
            post_1_0_0,
        });
    }

    // spam packages the ingest filter must drop
    let spam = [
        ("wowdude-101", "2016-01-01"),
        ("neat-77", "2016-02-01"),
        ("all-packages-5", "2016-03-01"),
    ];

    let mut projects = csv::Writer::from_path(dir.join("projects.csv"))?;
    projects.write_record([
        "Platform",
        "Name",
        "Created Timestamp",
        "Description",
        "Keywords",
        "Homepage URL",
        "Licenses",
        "SourceRank",
        "Dependent Repositories Count",
        "Repository URL",
        "Repository Stars Count",
        "Repository Size",
        "Repository Open Issues Count",
        "Repository License filename",
        "Repository Readme filename",
    ])?;
    for (i, p) in packages.iter().enumerate() {
        let has_repo = i % 7 != 0; // some rows lack repository data
        projects.write_record([
            "NPM",
            &p.name,
            &timestamp(p.created),
            if i % 5 == 0 { "" } else { "a synthetic package" },
            &p.keywords,
            if i % 3 == 0 { "" } else { "https://example.invalid/home" },
            if i % 4 == 0 { "" } else { "MIT" },
            &(i % 30).to_string(),
            &(i % 500).to_string(),
            if has_repo { "https://example.invalid/repo" } else { "" },
            if has_repo { "42" } else { "" },
            if has_repo { "1024" } else { "" },
            if has_repo { "7" } else { "" },
            if has_repo { "LICENSE" } else { "" },
            if has_repo { "README.md" } else { "" },
        ])?;
    }
    for (name, created) in spam {
        projects.write_record([
            "NPM", name, &timestamp(created.parse().unwrap()),
            "spam", "", "", "", "0", "0", "", "", "", "", "", "",
        ])?;
    }
    // a non-npm row ingestion must skip
    projects.write_record([
        "Pypi", "not-npm", "2016-01-01 00:00:00 UTC",
        "", "", "", "", "0", "0", "", "", "", "", "", "",
    ])?;
    projects.flush()?;

    let mut versions = csv::Writer::from_path(dir.join("versions.csv"))?;
    versions.write_record(["Platform", "Project Name", "Number", "Published Timestamp"])?;
    for p in &packages {
        for (number, d) in &p.versions {
            versions.write_record(["NPM", &p.name, number, &timestamp(*d)])?;
        }
    }
    for (name, created) in spam {
        versions.write_record(["NPM", name, "1.0.0", &timestamp(created.parse().unwrap())])?;
    }
    versions.flush()?;

    // each target gets 3–8 dependents whose constraints lean 90% toward
    // the crowd strategy implied by the target's maturity
    let mut deps = csv::Writer::from_path(dir.join("dependencies.csv"))?;
    deps.write_record([
        "Platform",
        "Project Name",
        "Version Number",
        "Dependency Name",
        "Dependency Kind",
        "Optional Dependency",
        "Dependency Requirements",
    ])?;
    let constraint_for = |target: &FixturePackage, lean: bool, rng: &mut rand_chacha::ChaCha8Rng| {
        let base = &target.versions.last().expect("at least one version").0;
        if target.post_1_0_0 {
            let crowd = if lean { 0 } else { rng.gen_range(1..3) };
            match crowd {
                0 => format!("^{base}"),  // Balanced crowd
                1 => format!("~{base}"),  // Restrictive
                _ => format!(">={base}"), // Permissive
            }
        } else if lean {
            format!(">={base}") // Permissive crowd for pre-1.0.0
        } else {
            base.clone() // pinned → Balanced
        }
    };
    for t in 0..n_targets {
        let n_deps = rng.gen_range(3..=8);
        for _ in 0..n_deps {
            let d = rng.gen_range(n_targets..n_packages);
            let dependent = &packages[d];
            let version = &dependent.versions.last().expect("non-empty").0;
            let lean = rng.gen_bool(0.9);
            let constraint = constraint_for(&packages[t], lean, &mut rng);
            deps.write_record([
                "NPM",
                &dependent.name,
                version,
                &packages[t].name,
                "runtime",
                "false",
                &constraint,
            ])?;
        }
    }
    // edges ingestion must drop: dev kind, optional, spam source,
    // unparseable requirement
    let some = &packages[n_targets];
    let some_version = &some.versions.last().expect("non-empty").0;
    deps.write_record([
        "NPM", &some.name, some_version, &packages[0].name,
        "development", "false", "^1.0.0",
    ])?;
    deps.write_record([
        "NPM", &some.name, some_version, &packages[1].name,
        "runtime", "true", "^1.0.0",
    ])?;
    deps.write_record([
        "NPM", "wowdude-101", "1.0.0", &packages[0].name,
        "runtime", "false", "^1.0.0",
    ])?;
    deps.write_record([
        "NPM", &some.name, some_version, &packages[2].name,
        "runtime", "false", "git://example.invalid/repo.git",
    ])?;
    deps.flush()?;
    Ok(())
}

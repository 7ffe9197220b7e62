//! End-to-end quality gates for the learning stack and an independent
//! recount oracle for the evolution series.
//!
//! The planted dataset hides a four-way rule inside 19 columns; a forest
//! that cannot rediscover it is broken regardless of unit-level health.
//! The evolution oracle rebuilds each month's tally from raw edges with
//! its own date arithmetic and its own constraint table, then checks the
//! library series month by month, plus the property that a sub-range query
//! is exactly a slice of the full series.

use std::collections::{BTreeMap, HashMap};

use chrono::{Duration, NaiveDate};
use depstrat_core::ecosystem::{
    DependencyEdge, DependencyKind, EcosystemSnapshot, PackageRecord, VersionRelease,
};
use depstrat_core::eval::macro_ovr_auc;
use depstrat_core::evolution::{evolution_series, Month};
use depstrat_core::forest::{split_dataset, train_forest, ForestParams};
use depstrat_core::rng::stream;
use depstrat_core::semver::Version;
use depstrat_core::synth::planted_dataset;
use depstrat_core::Real;
use rand::Rng;

#[test]
fn forest_recovers_planted_rule_and_gains_from_capacity() {
    let dataset = planted_dataset(2000, 424_242);
    let split = split_dataset(&dataset.labels, 424_242).unwrap();
    let train = dataset.subset(&split.train_indices);
    let test = dataset.subset(&split.test_indices);

    let full = train_forest(
        &train.rows,
        &train.labels,
        &train.feature_names,
        &ForestParams::default(),
        424_242,
    )
    .unwrap();
    let preds = full.predict_matrix(&test.rows).unwrap();

    let matches = preds
        .iter()
        .zip(&test.labels)
        .filter(|(p, t)| p.predicted == **t)
        .count();
    let rate = matches as Real / test.labels.len() as Real;
    assert!(
        rate >= 0.95,
        "held-out match rate {rate:.3} below 0.95 ({matches}/{})",
        test.labels.len()
    );

    let auc_full = macro_ovr_auc(&preds, &test.labels).unwrap();
    let small = train_forest(
        &train.rows,
        &train.labels,
        &train.feature_names,
        &ForestParams {
            n_trees: 10,
            min_samples_split: 8,
        },
        424_242,
    )
    .unwrap();
    let preds_small = small.predict_matrix(&test.rows).unwrap();
    let auc_small = macro_ovr_auc(&preds_small, &test.labels).unwrap();
    assert!(
        auc_full >= auc_small - 0.02,
        "capacity regression: 500 trees {auc_full:.4} vs 10 trees {auc_small:.4}"
    );
    assert!(auc_full > 0.9, "planted-rule AUC only {auc_full:.4}");
}

// ---- evolution recount oracle ----

const TARGET: &str = "lib-target";

/// (constraint text, tally bucket: b/r/p, or None when unclassifiable).
const POOL: &[(&str, Option<char>)] = &[
    ("^1.2.3", Some('b')),
    ("~1.2.3", Some('r')),
    ("1.2.3", Some('r')),
    (">=1.2.3", Some('p')),
    ("0.2.3", Some('b')),
    ("^0.2.3", Some('p')),
    ("git://example.com/repo.git", None),
];

fn date(text: &str) -> NaiveDate {
    NaiveDate::parse_from_str(text, "%Y-%m-%d").unwrap()
}

fn make_package(name: &str, versions: Vec<(Version, NaiveDate)>) -> PackageRecord {
    let created = versions.iter().map(|(_, d)| *d).min().unwrap();
    let latest = PackageRecord::compute_latest(
        &versions
            .iter()
            .map(|(v, d)| VersionRelease {
                version: v.clone(),
                published_at: *d,
            })
            .collect::<Vec<_>>(),
    );
    PackageRecord {
        name: name.to_string(),
        created_at: created,
        versions: versions
            .into_iter()
            .map(|(version, published_at)| VersionRelease {
                version,
                published_at,
            })
            .collect(),
        latest_version: latest,
        keywords: Vec::new(),
        has_description: false,
        has_homepage: false,
        license_text: String::new(),
        sourcerank: 0,
        repo: None,
        dependent_repositories: 0,
    }
}

struct Fixture {
    snapshot: EcosystemSnapshot,
    /// (dependent, version triple) -> pool constraint, runtime edges only.
    declared: HashMap<(String, (u64, u64, u64)), &'static str>,
    /// dependent -> releases as (date, triple), unsorted.
    releases: HashMap<String, Vec<(NaiveDate, (u64, u64, u64))>>,
}

fn random_fixture(rng: &mut impl Rng) -> Fixture {
    let epoch = date("2012-01-01");
    let mut packages = BTreeMap::new();
    let mut edges = Vec::new();
    let mut declared = HashMap::new();
    let mut releases: HashMap<String, Vec<(NaiveDate, (u64, u64, u64))>> = HashMap::new();

    packages.insert(
        TARGET.to_string(),
        make_package(
            TARGET,
            vec![
                (Version::new(0, 9, 0), date("2012-03-10")),
                (Version::new(1, 0, 0), date("2014-07-15")),
                (Version::new(1, 5, 0), date("2016-01-20")),
            ],
        ),
    );

    let n_deps = rng.gen_range(3..=12);
    for i in 0..n_deps {
        let name = format!("dep-{i:03}");
        let n_rel = rng.gen_range(1..=4);
        let mut version_dates = Vec::new();
        let mut shared_date: Option<NaiveDate> = None;
        for k in 0..n_rel {
            let triple = (k as u64 + 1, rng.gen_range(0..3), 0);
            // 1-in-4 releases share a publish date with the previous one,
            // forcing the version-precedence tie-break
            let d = match (shared_date, rng.gen_range(0..4)) {
                (Some(prev), 0) => prev,
                _ => epoch + Duration::days(rng.gen_range(0..2700)),
            };
            shared_date = Some(d);
            version_dates.push((Version::new(triple.0, triple.1, triple.2), d));
            releases.entry(name.clone()).or_default().push((d, triple));

            if rng.gen_range(0..4) < 3 {
                let (constraint, _) = POOL[rng.gen_range(0..POOL.len())];
                edges.push(DependencyEdge {
                    dependent: name.clone(),
                    dependent_version: Version::new(triple.0, triple.1, triple.2),
                    target: TARGET.to_string(),
                    constraint_text: constraint.to_string(),
                    kind: DependencyKind::Runtime,
                });
                declared.insert((name.clone(), triple), constraint);
            } else if rng.gen_range(0..3) == 0 {
                // a development-kind declaration must not count
                edges.push(DependencyEdge {
                    dependent: name.clone(),
                    dependent_version: Version::new(triple.0, triple.1, triple.2),
                    target: TARGET.to_string(),
                    constraint_text: "^1.2.3".to_string(),
                    kind: DependencyKind::Development,
                });
            }
        }
        packages.insert(name.clone(), make_package(&name, version_dates));
    }

    // noise the series must ignore: a self-edge and a ghost dependent
    edges.push(DependencyEdge {
        dependent: TARGET.to_string(),
        dependent_version: Version::new(1, 0, 0),
        target: TARGET.to_string(),
        constraint_text: "*".to_string(),
        kind: DependencyKind::Runtime,
    });
    if rng.gen_range(0..2) == 0 {
        edges.push(DependencyEdge {
            dependent: "ghost-package".to_string(),
            dependent_version: Version::new(1, 0, 0),
            target: TARGET.to_string(),
            constraint_text: "^1.2.3".to_string(),
            kind: DependencyKind::Runtime,
        });
    }

    let mut snapshot = EcosystemSnapshot {
        snapshot_date: date("2020-01-01"),
        packages,
        edges,
    };
    snapshot.sort_edges();
    Fixture {
        snapshot,
        declared,
        releases,
    }
}

fn last_day_of(year: i32, month: u32) -> NaiveDate {
    let (ny, nm) = if month == 12 {
        (year + 1, 1)
    } else {
        (year, month + 1)
    };
    NaiveDate::from_ymd_opt(ny, nm, 1).unwrap() - Duration::days(1)
}

/// Recount one month by hand: per dependent, the release with the highest
/// (publish date, version) pair not after the month's end, then that
/// release's declared constraint looked up in the pool table.
fn oracle_month(fixture: &Fixture, year: i32, month: u32) -> (usize, usize, usize) {
    let end = last_day_of(year, month);
    let pool: HashMap<&str, Option<char>> = POOL.iter().copied().collect();
    let (mut b, mut r, mut p) = (0, 0, 0);
    for (dep, rels) in &fixture.releases {
        let latest = rels
            .iter()
            .filter(|(d, _)| *d <= end)
            .max_by_key(|(d, t)| (*d, *t));
        let Some((_, triple)) = latest else { continue };
        let Some(constraint) = fixture.declared.get(&(dep.clone(), *triple)) else {
            continue;
        };
        match pool[constraint] {
            Some('b') => b += 1,
            Some('r') => r += 1,
            Some('p') => p += 1,
            Some(other) => panic!("bad bucket {other}"),
            None => {}
        }
    }
    (b, r, p)
}

#[test]
fn evolution_series_matches_hand_recount() {
    let mut rng = stream(60_601, &["oracle", "evolution"]);
    for case in 0..30 {
        let fixture = random_fixture(&mut rng);
        let from = Month::new(2012, 1);
        let to = Month::new(2019, 12);
        let series = evolution_series(&fixture.snapshot, TARGET, from, to).unwrap();
        assert_eq!(series.first_post_1_0_0.as_deref(), Some("2014-07"));
        assert_eq!(series.months.len(), 96);

        let mut idx = 0;
        for year in 2012..=2019 {
            for month in 1..=12u32 {
                let got = &series.months[idx];
                idx += 1;
                assert_eq!(got.month, format!("{year:04}-{month:02}"));
                let (b, r, p) = oracle_month(&fixture, year, month);
                assert_eq!(
                    (got.balanced, got.restrictive, got.permissive),
                    (b, r, p),
                    "case {case}, month {year:04}-{month:02}"
                );
            }
        }
    }
}

#[test]
fn sub_range_queries_are_slices_of_the_full_series() {
    let mut rng = stream(60_602, &["oracle", "evolution", "slices"]);
    let fixture = random_fixture(&mut rng);
    let full = evolution_series(
        &fixture.snapshot,
        TARGET,
        Month::new(2012, 1),
        Month::new(2019, 12),
    )
    .unwrap();

    for (from, to, offset) in [
        (Month::new(2012, 1), Month::new(2013, 6), 0usize),
        (Month::new(2014, 3), Month::new(2015, 11), 26),
        (Month::new(2016, 7), Month::new(2016, 7), 54),
        (Month::new(2019, 1), Month::new(2019, 12), 84),
    ] {
        let sub = evolution_series(&fixture.snapshot, TARGET, from, to).unwrap();
        let len = sub.months.len();
        assert_eq!(
            sub.months,
            full.months[offset..offset + len],
            "window {from}..{to}"
        );
    }
}

#[test]
fn month_end_boundary_is_inclusive() {
    // a release published exactly on the last day of a month counts in
    // that month; one day later waits for the next month
    let mut packages = BTreeMap::new();
    packages.insert(
        TARGET.to_string(),
        make_package(TARGET, vec![(Version::new(1, 0, 0), date("2014-01-01"))]),
    );
    packages.insert(
        "dep-000".to_string(),
        make_package(
            "dep-000",
            vec![
                (Version::new(1, 0, 0), date("2015-03-31")),
                (Version::new(2, 0, 0), date("2015-05-01")),
            ],
        ),
    );
    let edges = vec![
        DependencyEdge {
            dependent: "dep-000".to_string(),
            dependent_version: Version::new(1, 0, 0),
            target: TARGET.to_string(),
            constraint_text: "~1.2.3".to_string(),
            kind: DependencyKind::Runtime,
        },
        DependencyEdge {
            dependent: "dep-000".to_string(),
            dependent_version: Version::new(2, 0, 0),
            target: TARGET.to_string(),
            constraint_text: "^1.2.3".to_string(),
            kind: DependencyKind::Runtime,
        },
    ];
    let mut snapshot = EcosystemSnapshot {
        snapshot_date: date("2020-01-01"),
        packages,
        edges,
    };
    snapshot.sort_edges();
    let series =
        evolution_series(&snapshot, TARGET, Month::new(2015, 2), Month::new(2015, 5)).unwrap();
    let tally: Vec<(usize, usize, usize)> = series
        .months
        .iter()
        .map(|m| (m.balanced, m.restrictive, m.permissive))
        .collect();
    // Feb: nothing yet; Mar: 1.0.0 lands on the 31st -> restrictive;
    // Apr: unchanged; May: 2.0.0 -> balanced
    assert_eq!(tally, vec![(0, 0, 0), (0, 1, 0), (0, 1, 0), (1, 0, 0)]);
}

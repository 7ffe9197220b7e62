//! Strategy evolution over time.
//!
//! Reconstructs, for one target package, the monthly counts of dependents
//! per update strategy: at each month a dependent is represented by its
//! latest release published by month end (ties broken by version
//! precedence), counted once, under whatever constraint that release
//! declares on the target — or not at all if it dropped the dependency.
//! Shift detection reports changes of the dominant strategy that persist,
//! annotated when they land near the target's 1.0.0 release.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::ecosystem::{DependencyKind, EcosystemSnapshot};
use crate::semver::{classify_text, UpdateStrategy, Version};
use crate::{Error, Result};

/// A calendar month, ordered chronologically, rendered "YYYY-MM".
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Month {
    pub year: i32,
    pub month: u32,
}

impl Month {
    pub fn new(year: i32, month: u32) -> Month {
        assert!((1..=12).contains(&month));
        Month { year, month }
    }

    pub fn of_date(d: NaiveDate) -> Month {
        Month {
            year: d.year(),
            month: d.month(),
        }
    }

    /// Last day of the month.
    pub fn end(&self) -> NaiveDate {
        let (ny, nm) = if self.month == 12 {
            (self.year + 1, 1)
        } else {
            (self.year, self.month + 1)
        };
        NaiveDate::from_ymd_opt(ny, nm, 1)
            .expect("valid month")
            .pred_opt()
            .expect("not the first representable day")
    }

    pub fn next(&self) -> Month {
        if self.month == 12 {
            Month::new(self.year + 1, 1)
        } else {
            Month::new(self.year, self.month + 1)
        }
    }

    /// Months elapsed since year 0, for distance arithmetic.
    pub fn index(&self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }
}

impl fmt::Display for Month {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for Month {
    type Err = Error;

    fn from_str(s: &str) -> Result<Month> {
        let err = || Error::InvalidConfig(format!("expected YYYY-MM month, got {s:?}"));
        let (y, m) = s.split_once('-').ok_or_else(err)?;
        let year: i32 = y.parse().map_err(|_| err())?;
        let month: u32 = m.parse().map_err(|_| err())?;
        if !(1..=12).contains(&month) {
            return Err(err());
        }
        Ok(Month { year, month })
    }
}

/// Dependent tally for one month.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonthCount {
    pub month: String,
    pub balanced: usize,
    pub restrictive: usize,
    pub permissive: usize,
}

impl MonthCount {
    pub fn count(&self, strategy: UpdateStrategy) -> usize {
        match strategy {
            UpdateStrategy::Balanced => self.balanced,
            UpdateStrategy::Restrictive => self.restrictive,
            UpdateStrategy::Permissive => self.permissive,
        }
    }

    pub fn total(&self) -> usize {
        self.balanced + self.restrictive + self.permissive
    }

    /// Strategy with the strictly highest count; `None` on a tie for the
    /// maximum or an empty month.
    pub fn dominant(&self) -> Option<UpdateStrategy> {
        let max = self.balanced.max(self.restrictive).max(self.permissive);
        if max == 0 {
            return None;
        }
        let at_max: Vec<UpdateStrategy> = UpdateStrategy::ALL
            .iter()
            .copied()
            .filter(|&s| self.count(s) == max)
            .collect();
        if at_max.len() == 1 {
            Some(at_max[0])
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvolutionSeries {
    pub target: String,
    pub months: Vec<MonthCount>,
    /// Month of the target's earliest release with version ≥ 1.0.0.
    pub first_post_1_0_0: Option<String>,
}

/// Reconstruct the monthly dependent-strategy series for `target` over the
/// inclusive month range.
pub fn evolution_series(
    s: &EcosystemSnapshot,
    target: &str,
    from: Month,
    to: Month,
) -> Result<EvolutionSeries> {
    let target_pkg = s
        .packages
        .get(target)
        .ok_or_else(|| Error::UnknownPackage(target.to_string()))?;
    if from > to {
        return Err(Error::InvalidConfig(format!(
            "month range {from} > {to}"
        )));
    }

    // constraint each (dependent, version) declares on target, first edge
    // winning duplicates
    let mut declares: BTreeMap<(&str, &Version), &str> = BTreeMap::new();
    let mut dependents: BTreeMap<&str, ()> = BTreeMap::new();
    for e in &s.edges {
        if e.kind == DependencyKind::Runtime && e.target == target && e.dependent != target {
            declares
                .entry((e.dependent.as_str(), &e.dependent_version))
                .or_insert(e.constraint_text.as_str());
            dependents.insert(e.dependent.as_str(), ());
        }
    }

    // per dependent: releases ordered by (publish date, version), so the
    // latest by month end is the last admissible entry
    let mut timelines: Vec<(&str, Vec<(NaiveDate, &Version)>)> = Vec::new();
    for (&name, _) in &dependents {
        let Some(p) = s.packages.get(name) else {
            continue;
        };
        let mut releases: Vec<(NaiveDate, &Version)> =
            p.versions.iter().map(|r| (r.published_at, &r.version)).collect();
        releases.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));
        timelines.push((name, releases));
    }

    let mut months = Vec::new();
    let mut cursor = from;
    let mut positions = vec![0usize; timelines.len()];
    loop {
        let end = cursor.end();
        let mut count = MonthCount {
            month: cursor.to_string(),
            balanced: 0,
            restrictive: 0,
            permissive: 0,
        };
        for ((name, releases), pos) in timelines.iter().zip(&mut positions) {
            while *pos < releases.len() && releases[*pos].0 <= end {
                *pos += 1;
            }
            if *pos == 0 {
                continue; // nothing released yet
            }
            let latest = releases[*pos - 1].1;
            let Some(constraint) = declares.get(&(*name, latest)) else {
                continue; // this release does not depend on target
            };
            match classify_text(constraint) {
                Ok(UpdateStrategy::Balanced) => count.balanced += 1,
                Ok(UpdateStrategy::Restrictive) => count.restrictive += 1,
                Ok(UpdateStrategy::Permissive) => count.permissive += 1,
                Err(_) => {} // unclassifiable constraints are excluded
            }
        }
        months.push(count);
        if cursor == to {
            break;
        }
        cursor = cursor.next();
    }

    let first_post_1_0_0 = target_pkg
        .versions
        .iter()
        .filter(|r| r.version >= Version::new(1, 0, 0))
        .map(|r| r.published_at)
        .min()
        .map(|d| Month::of_date(d).to_string());

    Ok(EvolutionSeries {
        target: target.to_string(),
        months,
        first_post_1_0_0,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftEvent {
    pub month: String,
    pub from_strategy: UpdateStrategy,
    pub to_strategy: UpdateStrategy,
    pub persisted_months: usize,
    /// Whether the shift lands within two months of the target's 1.0.0.
    pub near_1_0_0: bool,
}

/// Detect dominant-strategy changes that persist for at least
/// `persistence` consecutive months. The first established dominant is a
/// starting state, not an event.
pub fn detect_shifts(series: &EvolutionSeries, persistence: usize) -> Vec<ShiftEvent> {
    let persistence = persistence.max(1);
    let dominants: Vec<Option<UpdateStrategy>> =
        series.months.iter().map(|m| m.dominant()).collect();
    let marker = series
        .first_post_1_0_0
        .as_deref()
        .and_then(|m| m.parse::<Month>().ok());

    let mut events = Vec::new();
    let mut current: Option<UpdateStrategy> = None;
    let mut i = 0;
    while i < dominants.len() {
        match dominants[i] {
            Some(s) if current != Some(s) => {
                let run = dominants[i..]
                    .iter()
                    .take_while(|&&d| d == Some(s))
                    .count();
                if run >= persistence {
                    if let Some(prev) = current {
                        let month = &series.months[i].month;
                        let near = match (&marker, month.parse::<Month>()) {
                            (Some(mark), Ok(m)) => (m.index() - mark.index()).abs() <= 2,
                            _ => false,
                        };
                        events.push(ShiftEvent {
                            month: month.clone(),
                            from_strategy: prev,
                            to_strategy: s,
                            persisted_months: run,
                            near_1_0_0: near,
                        });
                    }
                    current = Some(s);
                    i += run;
                } else {
                    i += 1; // flicker shorter than the persistence window
                }
            }
            _ => i += 1,
        }
    }
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecosystem::test_support::*;
    use UpdateStrategy::*;

    #[test]
    fn month_arithmetic_and_rendering() {
        let m: Month = "2019-12".parse().unwrap();
        assert_eq!(m, Month::new(2019, 12));
        assert_eq!(m.end(), date("2019-12-31"));
        assert_eq!(m.next().to_string(), "2020-01");
        assert_eq!(Month::new(2020, 2).end(), date("2020-02-29"));
        assert!("2020-13".parse::<Month>().is_err());
        assert!("202001".parse::<Month>().is_err());
    }

    fn series_fixture() -> EcosystemSnapshot {
        // dep releases v1 in Feb declaring ^1.0.0, v2 in Apr declaring
        // ~1.0.0; target ships 1.0.0 in January
        let target = package("target", "2019-01-01", &[("1.0.0", "2019-01-15")]);
        let dep = package(
            "dep",
            "2019-02-01",
            &[("1.0.0", "2019-02-10"), ("2.0.0", "2019-04-05")],
        );
        snapshot(
            vec![target, dep],
            vec![
                edge("dep", "1.0.0", "target", "^1.0.0"),
                edge("dep", "2.0.0", "target", "~1.0.0"),
            ],
        )
    }

    #[test]
    fn latest_version_rule_tracks_constraint_changes() {
        let s = series_fixture();
        let series = evolution_series(
            &s,
            "target",
            Month::new(2019, 1),
            Month::new(2019, 5),
        )
        .unwrap();
        let by_month: BTreeMap<&str, &MonthCount> = series
            .months
            .iter()
            .map(|m| (m.month.as_str(), m))
            .collect();
        assert_eq!(by_month["2019-01"].total(), 0);
        assert_eq!(by_month["2019-02"].balanced, 1);
        assert_eq!(by_month["2019-03"].balanced, 1);
        assert_eq!(by_month["2019-04"].restrictive, 1);
        assert_eq!(by_month["2019-04"].balanced, 0);
        assert_eq!(by_month["2019-05"].restrictive, 1);
        assert_eq!(series.first_post_1_0_0.as_deref(), Some("2019-01"));
    }

    #[test]
    fn dropping_the_dependency_removes_the_dependent() {
        let target = package("target", "2019-01-01", &[("1.0.0", "2019-01-15")]);
        let dep = package(
            "dep",
            "2019-02-01",
            &[("1.0.0", "2019-02-10"), ("2.0.0", "2019-04-05")],
        );
        // only v1 depends on target
        let s = snapshot(
            vec![target, dep],
            vec![edge("dep", "1.0.0", "target", "^1.0.0")],
        );
        let series =
            evolution_series(&s, "target", Month::new(2019, 2), Month::new(2019, 5)).unwrap();
        let totals: Vec<usize> = series.months.iter().map(|m| m.total()).collect();
        assert_eq!(totals, vec![1, 1, 0, 0]);
    }

    #[test]
    fn unknown_target_is_rejected() {
        let s = series_fixture();
        assert!(matches!(
            evolution_series(&s, "ghost", Month::new(2019, 1), Month::new(2019, 2)),
            Err(Error::UnknownPackage(_))
        ));
        assert!(evolution_series(&s, "target", Month::new(2019, 3), Month::new(2019, 1)).is_err());
    }

    fn hand_series(dominants: &[(usize, usize, usize)], first: Option<&str>) -> EvolutionSeries {
        let months = dominants
            .iter()
            .enumerate()
            .map(|(i, &(b, r, p))| MonthCount {
                month: Month::new(2015, 1 + i as u32 % 12).to_string(),
                balanced: b,
                restrictive: r,
                permissive: p,
            })
            .collect();
        EvolutionSeries {
            target: "t".into(),
            months,
            first_post_1_0_0: first.map(String::from),
        }
    }

    #[test]
    fn constant_dominant_yields_no_events() {
        let series = hand_series(&[(5, 1, 1); 24], None);
        assert!(detect_shifts(&series, 3).is_empty());
    }

    #[test]
    fn flicker_below_persistence_is_ignored() {
        // P, B, P with persistence 3: no events
        let series = hand_series(&[(0, 0, 5), (5, 0, 0), (0, 0, 5), (0, 0, 5), (0, 0, 5)], None);
        assert!(detect_shifts(&series, 3).is_empty());
    }

    #[test]
    fn persistent_change_emits_one_annotated_event() {
        // 12 months P then 12 months B; 1.0.0 lands at the boundary month
        let mut months = Vec::new();
        let mut cursor = Month::new(2014, 1);
        for i in 0..24 {
            let (b, p) = if i < 12 { (1, 6) } else { (6, 1) };
            months.push(MonthCount {
                month: cursor.to_string(),
                balanced: b,
                restrictive: 0,
                permissive: p,
            });
            cursor = cursor.next();
        }
        let series = EvolutionSeries {
            target: "t".into(),
            months,
            first_post_1_0_0: Some("2015-01".into()),
        };
        let events = detect_shifts(&series, 3);
        assert_eq!(events.len(), 1);
        let e = &events[0];
        assert_eq!(e.month, "2015-01");
        assert_eq!(e.from_strategy, Permissive);
        assert_eq!(e.to_strategy, Balanced);
        assert_eq!(e.persisted_months, 12);
        assert!(e.near_1_0_0);
    }

    #[test]
    fn ties_have_no_dominant() {
        let tied = MonthCount {
            month: "2019-01".into(),
            balanced: 3,
            restrictive: 3,
            permissive: 1,
        };
        assert_eq!(tied.dominant(), None);
        let empty = MonthCount {
            month: "2019-02".into(),
            balanced: 0,
            restrictive: 0,
            permissive: 0,
        };
        assert_eq!(empty.dominant(), None);
    }
}

//! Snapshot filtering and missing-value imputation.

use serde::{Deserialize, Serialize};

use super::{DependencyKind, EcosystemSnapshot, RepoMetadata};

/// Name stems of the bulk-dependency spam families dropped from the data.
pub const SPAM_STEMS: [&str; 3] = ["all-packages", "wowdude", "neat"];

/// Anchored match for `<stem>-<digits>`, case-sensitive.
fn is_spam(name: &str, extra_stems: &[String]) -> bool {
    let matches_stem = |stem: &str| {
        name.strip_prefix(stem)
            .and_then(|rest| rest.strip_prefix('-'))
            .is_some_and(|digits| !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()))
    };
    SPAM_STEMS.iter().any(|s| matches_stem(s)) || extra_stems.iter().any(|s| matches_stem(s))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterReport {
    pub development_edges_removed: usize,
    pub optional_edges_removed: usize,
    pub spam_packages_removed: usize,
    pub spam_edges_removed: usize,
}

/// Drop development/optional edges and spam packages (with every edge that
/// touches them). Packages with fewer than 2 runtime dependents stay in the
/// snapshot — they are excluded from the labeled population downstream but
/// still act as dependents.
pub fn apply_filters(
    mut s: EcosystemSnapshot,
    extra_spam_stems: &[String],
) -> (EcosystemSnapshot, FilterReport) {
    let mut report = FilterReport::default();

    let spam: Vec<String> = s
        .packages
        .keys()
        .filter(|name| is_spam(name, extra_spam_stems))
        .cloned()
        .collect();
    report.spam_packages_removed = spam.len();
    for name in &spam {
        s.packages.remove(name);
    }

    s.edges.retain(|e| {
        match e.kind {
            DependencyKind::Development => {
                report.development_edges_removed += 1;
                return false;
            }
            DependencyKind::Optional => {
                report.optional_edges_removed += 1;
                return false;
            }
            DependencyKind::Runtime => {}
        }
        if !s.packages.contains_key(&e.dependent) || !s.packages.contains_key(&e.target) {
            report.spam_edges_removed += 1;
            return false;
        }
        true
    });

    (s, report)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImputationReport {
    pub stars_imputed: usize,
    pub open_issues_imputed: usize,
    pub size_imputed: usize,
    pub size_median_kb: i64,
}

/// Fill missing repository counts: stars and open issues default to zero,
/// repository size to the median of the sizes that are present.
pub fn impute_missing(mut s: EcosystemSnapshot) -> (EcosystemSnapshot, ImputationReport) {
    let mut report = ImputationReport::default();

    let mut present_sizes: Vec<i64> = s
        .packages
        .values()
        .filter_map(|p| p.repo.as_ref().and_then(|r| r.size_kb))
        .collect();
    present_sizes.sort_unstable();
    let median = if present_sizes.is_empty() {
        0
    } else {
        let n = present_sizes.len();
        if n % 2 == 1 {
            present_sizes[n / 2]
        } else {
            (present_sizes[n / 2 - 1] + present_sizes[n / 2]) / 2
        }
    };
    report.size_median_kb = median;

    for p in s.packages.values_mut() {
        let repo = p.repo.get_or_insert_with(RepoMetadata::default);
        if repo.stars.is_none() {
            repo.stars = Some(0);
            report.stars_imputed += 1;
        }
        if repo.open_issues.is_none() {
            repo.open_issues = Some(0);
            report.open_issues_imputed += 1;
        }
        if repo.size_kb.is_none() {
            repo.size_kb = Some(median);
            report.size_imputed += 1;
        }
    }

    (s, report)
}

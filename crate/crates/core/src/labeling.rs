//! Specialization labels: the majority update strategy among a package's
//! dependents, or Unspecialized when no strategy clears the threshold.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{atomic_write, RunConfig};
use crate::ecosystem::EcosystemSnapshot;
use crate::error::Error;
use crate::semver::{classify_text, UpdateStrategy};
use crate::Result;

/// The four classes the downstream model predicts, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LabelClass {
    Balanced,
    Permissive,
    Restrictive,
    Unspecialized,
}

impl LabelClass {
    pub const ORDER: [LabelClass; 4] = [
        LabelClass::Balanced,
        LabelClass::Permissive,
        LabelClass::Restrictive,
        LabelClass::Unspecialized,
    ];

    pub fn index(&self) -> usize {
        match self {
            LabelClass::Balanced => 0,
            LabelClass::Permissive => 1,
            LabelClass::Restrictive => 2,
            LabelClass::Unspecialized => 3,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            LabelClass::Balanced => "Balanced",
            LabelClass::Permissive => "Permissive",
            LabelClass::Restrictive => "Restrictive",
            LabelClass::Unspecialized => "Unspecialized",
        }
    }
}

impl fmt::Display for LabelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LabelClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<LabelClass> {
        match s {
            "Balanced" => Ok(LabelClass::Balanced),
            "Permissive" => Ok(LabelClass::Permissive),
            "Restrictive" => Ok(LabelClass::Restrictive),
            "Unspecialized" => Ok(LabelClass::Unspecialized),
            other => Err(Error::InvalidConfig(format!("unknown label {other:?}"))),
        }
    }
}

impl From<UpdateStrategy> for LabelClass {
    fn from(s: UpdateStrategy) -> LabelClass {
        match s {
            UpdateStrategy::Balanced => LabelClass::Balanced,
            UpdateStrategy::Restrictive => LabelClass::Restrictive,
            UpdateStrategy::Permissive => LabelClass::Permissive,
        }
    }
}

/// How a package's dependents split across the three strategies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyDistribution {
    pub balanced: usize,
    pub restrictive: usize,
    pub permissive: usize,
    /// Dependents whose constraint could not be classified (non-registry
    /// sources, unknown dist-tags, malformed ranges). They reduce the
    /// denominator instead of forming a class of their own.
    pub excluded: usize,
}

impl StrategyDistribution {
    pub fn total(&self) -> usize {
        self.balanced + self.restrictive + self.permissive
    }

    pub fn count(&self, s: UpdateStrategy) -> usize {
        match s {
            UpdateStrategy::Balanced => self.balanced,
            UpdateStrategy::Restrictive => self.restrictive,
            UpdateStrategy::Permissive => self.permissive,
        }
    }

    fn add(&mut self, s: UpdateStrategy) {
        match s {
            UpdateStrategy::Balanced => self.balanced += 1,
            UpdateStrategy::Restrictive => self.restrictive += 1,
            UpdateStrategy::Permissive => self.permissive += 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecializationLabel {
    pub value: LabelClass,
    /// Share of the winning strategy (the maximum share even when the
    /// package ends up Unspecialized).
    pub agreement: f64,
}

fn check_threshold(threshold: f64) -> Result<()> {
    if !(0.5..1.0).contains(&threshold) {
        return Err(Error::InvalidConfig(format!(
            "specialization threshold must be in [0.5, 1), got {threshold}"
        )));
    }
    Ok(())
}

/// Classify every dependent constraint of `package` (latest runtime edges).
pub fn strategy_distribution(
    s: &EcosystemSnapshot,
    package: &str,
) -> Result<StrategyDistribution> {
    if !s.packages.contains_key(package) {
        return Err(Error::UnknownPackage(package.to_string()));
    }
    let by_target = s.runtime_dependents();
    let mut dist = StrategyDistribution::default();
    for e in by_target.get(package).map(Vec::as_slice).unwrap_or(&[]) {
        match classify_text(&e.constraint_text) {
            Ok(strategy) => dist.add(strategy),
            Err(_) => dist.excluded += 1,
        }
    }
    Ok(dist)
}

/// Majority vote with a strict threshold: the winner needs share strictly
/// above `threshold`, ties and sub-threshold majorities are Unspecialized.
pub fn label(dist: &StrategyDistribution, threshold: f64) -> Result<SpecializationLabel> {
    check_threshold(threshold)?;
    let total = dist.total();
    if total < 2 {
        return Err(Error::InsufficientDependents {
            name: String::new(),
            total,
        });
    }
    let (winner, count) = UpdateStrategy::ALL
        .iter()
        .map(|&s| (s, dist.count(s)))
        .max_by_key(|&(_, c)| c)
        .expect("three strategies");
    let agreement = count as f64 / total as f64;
    let value = if agreement > threshold {
        LabelClass::from(winner)
    } else {
        LabelClass::Unspecialized
    };
    Ok(SpecializationLabel { value, agreement })
}

/// One labeled package, as written to the labels artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRow {
    pub package: String,
    pub label: LabelClass,
    pub agreement: f64,
    pub n_dependents: usize,
    pub n_excluded: usize,
}

/// Label every package with at least 2 classified runtime dependents.
pub fn label_all(
    s: &EcosystemSnapshot,
    threshold: f64,
) -> Result<BTreeMap<String, LabelRow>> {
    check_threshold(threshold)?;
    let by_target = s.runtime_dependents();
    let mut out = BTreeMap::new();
    for (target, edges) in by_target {
        let mut dist = StrategyDistribution::default();
        for e in &edges {
            match classify_text(&e.constraint_text) {
                Ok(strategy) => dist.add(strategy),
                Err(_) => dist.excluded += 1,
            }
        }
        if dist.total() < 2 {
            continue;
        }
        let lab = label(&dist, threshold)?;
        out.insert(
            target.to_string(),
            LabelRow {
                package: target.to_string(),
                label: lab.value,
                agreement: lab.agreement,
                n_dependents: dist.total(),
                n_excluded: dist.excluded,
            },
        );
    }
    Ok(out)
}

/// Class counts at one threshold, for the sweep table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub threshold: f64,
    pub balanced: usize,
    pub permissive: usize,
    pub restrictive: usize,
    pub unspecialized: usize,
    pub labeled_total: usize,
}

/// Label the population at each threshold and tabulate the class mix.
pub fn sweep_thresholds(s: &EcosystemSnapshot, thresholds: &[f64]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(thresholds.len());
    for &t in thresholds {
        let labels = label_all(s, t)?;
        let mut row = SweepRow {
            threshold: t,
            balanced: 0,
            permissive: 0,
            restrictive: 0,
            unspecialized: 0,
            labeled_total: labels.len(),
        };
        for l in labels.values() {
            match l.label {
                LabelClass::Balanced => row.balanced += 1,
                LabelClass::Permissive => row.permissive += 1,
                LabelClass::Restrictive => row.restrictive += 1,
                LabelClass::Unspecialized => row.unspecialized += 1,
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Write labels as CSV with a provenance comment line.
pub fn write_labels_csv(
    path: &Path,
    labels: &BTreeMap<String, LabelRow>,
    config: &RunConfig,
) -> Result<()> {
    let mut out = config.csv_header();
    out.push_str("package,label,agreement,n_dependents,n_excluded\n");
    for row in labels.values() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.package, row.label, row.agreement, row.n_dependents, row.n_excluded
        ));
    }
    atomic_write(path, out.as_bytes())
}

/// Read a labels artifact back.
pub fn read_labels_csv(path: &Path) -> Result<BTreeMap<String, LabelRow>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.display().to_string()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut out = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let schema_err = |detail: String| Error::SchemaMismatch {
            file: path.display().to_string(),
            detail,
        };
        let get = |i: usize| record.get(i).unwrap_or("").to_string();
        let row = LabelRow {
            package: get(0),
            label: get(1).parse()?,
            agreement: get(2)
                .parse()
                .map_err(|e| schema_err(format!("agreement: {e}")))?,
            n_dependents: get(3)
                .parse()
                .map_err(|e| schema_err(format!("n_dependents: {e}")))?,
            n_excluded: get(4)
                .parse()
                .map_err(|e| schema_err(format!("n_excluded: {e}")))?,
        };
        out.insert(row.package.clone(), row);
    }
    Ok(out)
}

//! In-memory feature matrix with CSV serialization.
//!
//! Layout mirrors the feature artifact: a leading package-name column, one
//! column per feature, and a trailing label column. Rows stay in package
//! name order so the artifact is byte-stable.

use std::path::Path;

use crate::config::{atomic_write, RunConfig};
use crate::error::Error;
use crate::labeling::LabelClass;
use crate::{Real, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub packages: Vec<String>,
    /// Row-major; every row has `feature_names.len()` entries.
    pub rows: Vec<Vec<Real>>,
    pub labels: Vec<LabelClass>,
}

impl Dataset {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn label_indices(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.index()).collect()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    pub fn column(&self, feature: usize) -> Vec<Real> {
        self.rows.iter().map(|r| r[feature]).collect()
    }

    /// Rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            packages: indices.iter().map(|&i| self.packages[i].clone()).collect(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    fn check_shape(&self) -> Result<()> {
        let d = self.n_features();
        for row in &self.rows {
            if row.len() != d {
                return Err(Error::FeatureArity {
                    got: row.len(),
                    expected: d,
                });
            }
        }
        Ok(())
    }

    /// Write `package,<features...>,label` with a provenance comment line.
    pub fn write_csv(&self, path: &Path, config: &RunConfig) -> Result<()> {
        self.check_shape()?;
        let mut out = config.csv_header();
        out.push_str("package,");
        out.push_str(&self.feature_names.join(","));
        out.push_str(",label\n");
        for i in 0..self.n_rows() {
            out.push_str(&self.packages[i]);
            for v in &self.rows[i] {
                out.push(',');
                out.push_str(&format_value(*v));
            }
            out.push(',');
            out.push_str(self.labels[i].as_str());
            out.push('\n');
        }
        atomic_write(path, out.as_bytes())
    }

    pub fn read_csv(path: &Path) -> Result<Dataset> {
        if !path.exists() {
            return Err(Error::MissingFile(path.display().to_string()));
        }
        let schema_err = |detail: String| Error::SchemaMismatch {
            file: path.display().to_string(),
            detail,
        };
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_path(path)?;
        let headers = reader.headers()?.clone();
        let cols: Vec<&str> = headers.iter().collect();
        if cols.first() != Some(&"package") || cols.last() != Some(&"label") {
            return Err(schema_err(
                "expected leading `package` and trailing `label` columns".to_string(),
            ));
        }
        let feature_names: Vec<String> =
            cols[1..cols.len() - 1].iter().map(|s| s.to_string()).collect();
        let expected = feature_names.len();

        let mut packages = Vec::new();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for record in reader.records() {
            let record = record?;
            if record.len() != expected + 2 {
                return Err(Error::FeatureArity {
                    got: record.len().saturating_sub(2),
                    expected,
                });
            }
            packages.push(record.get(0).unwrap_or("").to_string());
            let mut row = Vec::with_capacity(expected);
            for i in 1..=expected {
                let field = record.get(i).unwrap_or("");
                row.push(
                    field
                        .parse::<Real>()
                        .map_err(|e| schema_err(format!("bad value {field:?}: {e}")))?,
                );
            }
            rows.push(row);
            labels.push(record.get(expected + 1).unwrap_or("").parse()?);
        }
        Ok(Dataset {
            feature_names,
            packages,
            rows,
            labels,
        })
    }
}

/// Shortest lossless decimal form: integers print without a trailing ".0".
fn format_value(v: Real) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

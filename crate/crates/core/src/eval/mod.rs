//! Model evaluation and interpretation: confusion-matrix metrics,
//! one-vs-rest ROC-AUC, permutation feature importance, and partial
//! dependence grids.

pub mod importance;
pub mod metrics;
pub mod pdp;
pub mod roc;

pub use importance::{permutation_importance, FeatureImportance, ImportanceReport};
pub use metrics::{
    confusion_matrix, evaluate, per_class_metrics, weighted_f1, ClassMetrics, EvaluationReport,
};
pub use pdp::{partial_dependence, PdpGrid, PdpOptions};
pub use roc::{binary_auc, macro_ovr_auc, per_class_auc};

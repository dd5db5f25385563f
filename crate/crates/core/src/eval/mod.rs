//! Classification metrics, ROC analysis and the cross-validated comparison
//! of the co-cluster classifier against logistic regression.

mod compare;
pub mod kfold;
mod metrics;
mod roc;

pub use compare::{
    compare_classifiers, evaluate_pooled, ClassifierKind, CompareConfig, Comparison, ComparisonCell,
    EvalReport, FeatureSet,
};
pub use kfold::{kfold_split, shuffled_folds, Fold};
pub use metrics::{f1_score, metrics_from_counts, ConfusionCounts, Metrics};
pub use roc::{roc_from_scores, RocCurve, RocPoint};

//! Graduation classifiers: the co-cluster classifier built on a fitted
//! K-means model, and an L2-regularized logistic-regression baseline.
//!
//! Both predict `true` (graduated) when the probability is at least the
//! threshold, 0.5 by default.

mod cocluster;
mod logistic;

pub use cocluster::{cluster_classifier_predict, cluster_classifier_train, ClusterClassifier};
pub use logistic::{
    logistic_fit, logistic_gradient, logistic_objective, logistic_predict, sigmoid, LogisticConfig,
    LogisticModel,
};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

pub(crate) fn check_threshold(t: f64) -> crate::Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(crate::Error::InvalidArgument(format!("threshold must lie in (0, 1), got {t}")))
    }
}

use serde::{Deserialize, Serialize};

use super::{check_threshold, DEFAULT_THRESHOLD};
use crate::cluster::KMeansModel;
use crate::error::{Error, Result};

/// Scores a student by the graduate fraction of the training cluster nearest
/// to them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterClassifier {
    pub model: KMeansModel,
    pub cluster_pos_fraction: Vec<f64>,
    pub cluster_sizes: Vec<usize>,
    pub threshold: f64,
}

impl ClusterClassifier {
    pub fn with_threshold(mut self, threshold: f64) -> Result<Self> {
        check_threshold(threshold)?;
        self.threshold = threshold;
        Ok(self)
    }

    pub fn predict(&self, x: &[f64]) -> Result<(f64, bool)> {
        cluster_classifier_predict(self, x)
    }
}

pub fn cluster_classifier_train(model: KMeansModel, labels: &[bool]) -> Result<ClusterClassifier> {
    if labels.len() != model.n() {
        return Err(Error::LengthMismatch {
            expected: model.n(),
            got: labels.len(),
        });
    }
    let mut sizes = vec![0usize; model.k];
    let mut positives = vec![0usize; model.k];
    for (&a, &y) in model.assignments.iter().zip(labels) {
        if a >= model.k {
            return Err(Error::ClusterIndexOutOfRange { index: a, k: model.k });
        }
        sizes[a] += 1;
        positives[a] += usize::from(y);
    }
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::EmptyCluster(empty));
    }
    let cluster_pos_fraction = positives
        .iter()
        .zip(&sizes)
        .map(|(&p, &s)| p as f64 / s as f64)
        .collect();
    Ok(ClusterClassifier {
        model,
        cluster_pos_fraction,
        cluster_sizes: sizes,
        threshold: DEFAULT_THRESHOLD,
    })
}

pub fn cluster_classifier_predict(c: &ClusterClassifier, x: &[f64]) -> Result<(f64, bool)> {
    let j = c.model.nearest(x)?;
    let p = c.cluster_pos_fraction[j];
    Ok((p, p >= c.threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::KMeansConfig;
    use crate::matrix::Matrix;

    fn model(centroids: &[f64], assignments: Vec<usize>) -> KMeansModel {
        KMeansModel {
            k: centroids.len(),
            centroids: Matrix::column(centroids),
            assignments,
            inertia: 0.0,
            config: KMeansConfig::new(centroids.len(), 0),
            iterations: 1,
        }
    }

    #[test]
    fn fractions() {
        let c = cluster_classifier_train(model(&[0.0], vec![0; 4]), &[true, true, true, false]).unwrap();
        assert_eq!(c.cluster_pos_fraction, vec![0.75]);
        assert_eq!(c.cluster_sizes, vec![4]);

        let c = cluster_classifier_train(model(&[0.0], vec![0; 3]), &[true; 3]).unwrap();
        assert_eq!(c.cluster_pos_fraction, vec![1.0]);

        let c = cluster_classifier_train(model(&[0.0, 5.0], vec![0, 0, 1, 1]), &[true, false, false, false])
            .unwrap();
        assert_eq!(c.cluster_pos_fraction, vec![0.5, 0.0]);
    }

    #[test]
    fn prediction_and_threshold_boundary() {
        let c = cluster_classifier_train(model(&[0.0, 5.0], vec![0, 0, 0, 0, 1, 1]), &[true, true, true, false, true, false])
            .unwrap();
        assert_eq!(c.predict(&[0.4]).unwrap(), (0.75, true));
        // 0.5 sits on the threshold and counts as positive
        assert_eq!(c.predict(&[4.0]).unwrap(), (0.5, true));
        assert!(c.predict(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn equidistant_point_takes_lowest_cluster() {
        let m = model(&[-1.0, 1.0], vec![0; 5].into_iter().chain(vec![1; 10]).collect());
        let labels: Vec<bool> = (0..5).map(|i| i == 0).chain((0..10).map(|i| i != 0)).collect();
        let c = cluster_classifier_train(m, &labels).unwrap();
        assert_eq!(c.cluster_pos_fraction, vec![0.2, 0.9]);
        assert_eq!(c.predict(&[0.0]).unwrap(), (0.2, false));
    }

    #[test]
    fn training_errors() {
        assert!(matches!(
            cluster_classifier_train(model(&[0.0], vec![0; 3]), &[true]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            cluster_classifier_train(model(&[0.0, 1.0], vec![0; 3]), &[true; 3]),
            Err(Error::EmptyCluster(1))
        ));
        let c = cluster_classifier_train(model(&[0.0], vec![0; 2]), &[true, false]).unwrap();
        assert!(c.with_threshold(1.0).is_err());
    }
}

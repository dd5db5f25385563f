use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn from_predictions(predicted: &[bool], actual: &[bool]) -> Result<Self> {
        if predicted.len() != actual.len() {
            return Err(Error::LengthMismatch {
                expected: actual.len(),
                got: predicted.len(),
            });
        }
        let mut c = ConfusionCounts::default();
        for (&p, &a) in predicted.iter().zip(actual) {
            match (p, a) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, false) => c.tn += 1,
                (false, true) => c.fn_ += 1,
            }
        }
        Ok(c)
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

/// Accuracy, precision, recall and F1. A ratio with a zero denominator is
/// reported as 0 and flagged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub precision_undefined: bool,
    pub recall_undefined: bool,
    pub f1_undefined: bool,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn metrics_from_counts(c: &ConfusionCounts) -> Result<Metrics> {
    let total = c.total();
    if total == 0 {
        return Err(Error::InvalidArgument("no evaluated samples".into()));
    }
    let (accuracy, _) = ratio(c.tp + c.tn, total);
    let (precision, precision_undefined) = ratio(c.tp, c.tp + c.fp);
    let (recall, recall_undefined) = ratio(c.tp, c.tp + c.fn_);
    let f1 = f1_score(precision, recall);
    Ok(Metrics {
        accuracy,
        precision,
        recall,
        f1,
        precision_undefined,
        recall_undefined,
        f1_undefined: precision + recall == 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_correct() {
        let c = ConfusionCounts { tp: 3, fp: 0, tn: 2, fn_: 0 };
        let m = metrics_from_counts(&c).unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall, m.f1), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn f1_of_reported_rows() {
        assert!((f1_score(0.87, 0.92) - 0.894).abs() < 5e-4);
        assert!((f1_score(0.71, 1.0) - 0.830).abs() < 5e-4);
    }

    #[test]
    fn zero_denominators_are_flagged() {
        let c = ConfusionCounts { tp: 0, fp: 0, tn: 4, fn_: 1 };
        let m = metrics_from_counts(&c).unwrap();
        assert_eq!(m.precision, 0.0);
        assert!(m.precision_undefined);
        assert!(!m.recall_undefined);
        assert_eq!(m.f1, 0.0);
        assert!(m.f1_undefined);
        assert!(metrics_from_counts(&ConfusionCounts::default()).is_err());
    }

    #[test]
    fn counting() {
        let c = ConfusionCounts::from_predictions(&[true, true, false, false], &[true, false, false, true]).unwrap();
        assert_eq!(c, ConfusionCounts { tp: 1, fp: 1, tn: 1, fn_: 1 });
        assert!(ConfusionCounts::from_predictions(&[true], &[]).is_err());
    }
}

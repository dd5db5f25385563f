use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// Starts at (0, 0) and ends at (1, 1).
    pub points: Vec<RocPoint>,
    /// Distinct scores, descending; `points[i + 1]` predicts positive for
    /// every score `>= thresholds[i]`.
    pub thresholds: Vec<f64>,
    pub auc: f64,
}

impl RocCurve {
    /// Two-column `fpr,tpr` CSV.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["fpr", "tpr"])?;
        for p in &self.points {
            w.write_record([p.fpr.to_string(), p.tpr.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<roc output>", e))?;
        Ok(())
    }
}

/// ROC curve with tied scores grouped into one step, and its trapezoidal area.
pub fn roc_from_scores(scores: &[f64], labels: &[bool]) -> Result<RocCurve> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            expected: labels.len(),
            got: scores.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument("NaN score".into()));
    }
    let pos = labels.iter().filter(|&&l| l).count() as u64;
    let neg = labels.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::DegenerateLabels("ROC needs both classes".into()));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![RocPoint { fpr: 0.0, tpr: 0.0 }];
    let mut thresholds = Vec::new();
    let (mut tp, mut fp) = (0u64, 0u64);
    // twice the area, in units of 1 / (pos * neg)
    let mut area2: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (tp0, fp0) = (tp, fp);
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        area2 += u128::from(fp - fp0) * u128::from(tp + tp0);
        thresholds.push(s);
        points.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
        });
    }
    let auc = area2 as f64 / (2.0 * pos as f64 * neg as f64);
    Ok(RocCurve { points, thresholds, auc })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_separation() {
        let r = roc_from_scores(&[0.9, 0.8, 0.2, 0.1], &[true, true, false, false]).unwrap();
        assert_eq!(r.auc, 1.0);
    }

    #[test]
    fn all_tied() {
        let r = roc_from_scores(&[0.4; 5], &[true, false, true, false, false]).unwrap();
        assert_eq!(r.points, vec![RocPoint { fpr: 0.0, tpr: 0.0 }, RocPoint { fpr: 1.0, tpr: 1.0 }]);
        assert_eq!(r.auc, 0.5);
    }

    #[test]
    fn three_of_four_pairs() {
        let r = roc_from_scores(&[0.9, 0.8, 0.7, 0.3], &[true, false, true, false]).unwrap();
        assert_eq!(r.auc, 0.75);
        assert_eq!(r.thresholds, vec![0.9, 0.8, 0.7, 0.3]);
    }

    #[test]
    fn single_class_is_rejected() {
        assert!(roc_from_scores(&[0.1, 0.2], &[true, true]).is_err());
        assert!(roc_from_scores(&[0.1], &[true, false]).is_err());
    }

    #[test]
    fn csv_export() {
        let r = roc_from_scores(&[0.9, 0.1], &[true, false]).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "fpr,tpr\n0,0\n0,1\n1,1\n");
    }
}

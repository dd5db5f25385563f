use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{squared_distance, Matrix};

/// Between- and within-cluster dispersion and the resulting index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChComponents {
    pub ssb: f64,
    pub ssw: f64,
    /// `(ssb / (k-1)) / (ssw / (n-k))`, or `+inf` when `ssw == 0`.
    pub score: f64,
}

/// Calinski-Harabasz index of a labelling.
pub fn ch_index(data: &Matrix, assignments: &[usize], k: usize) -> Result<f64> {
    ch_components(data, assignments, k).map(|c| c.score)
}

pub fn ch_components(data: &Matrix, assignments: &[usize], k: usize) -> Result<ChComponents> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "Calinski-Harabasz needs at least 2 clusters, got {k}"
        )));
    }
    let n = data.rows();
    if assignments.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: assignments.len(),
        });
    }
    if n <= k {
        return Err(Error::InsufficientSamples { needed: k + 1, got: n });
    }
    if let Some(&bad) = assignments.iter().find(|&&a| a >= k) {
        return Err(Error::ClusterIndexOutOfRange { index: bad, k });
    }

    let d = data.cols();
    let mut counts = vec![0usize; k];
    let mut centroids = Matrix::zeros(k, d);
    for (x, &a) in data.iter_rows().zip(assignments) {
        counts[a] += 1;
        for (c, v) in centroids.row_mut(a).iter_mut().zip(x) {
            *c += v;
        }
    }
    if let Some(empty) = counts.iter().position(|&c| c == 0) {
        return Err(Error::EmptyCluster(empty));
    }
    for (j, &c) in counts.iter().enumerate() {
        centroids.row_mut(j).iter_mut().for_each(|v| *v /= c as f64);
    }
    let grand = data.column_means();

    let ssb: f64 = counts
        .iter()
        .enumerate()
        .map(|(j, &c)| c as f64 * squared_distance(centroids.row(j), &grand))
        .sum();
    let ssw: f64 = data
        .iter_rows()
        .zip(assignments)
        .map(|(x, &a)| squared_distance(x, centroids.row(a)))
        .sum();

    let score = if ssw == 0.0 {
        f64::INFINITY
    } else {
        (ssb / (k - 1) as f64) / (ssw / (n - k) as f64)
    };
    Ok(ChComponents { ssb, ssw, score })
}

//! Lloyd's K-means with k-means++ seeding and seeded restarts.

use std::collections::HashSet;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{squared_distance, Matrix};
use crate::rng::{derive_seed, rng_from_seed, stream, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub restarts: usize,
    pub max_iters: usize,
    /// Lloyd stops once the relative inertia decrease falls below this.
    pub rel_tol: f64,
    pub seed: u64,
}

impl KMeansConfig {
    pub const DEFAULT_RESTARTS: usize = 10;
    pub const DEFAULT_MAX_ITERS: usize = 300;
    pub const DEFAULT_REL_TOL: f64 = 1e-9;

    pub fn new(k: usize, seed: u64) -> Self {
        KMeansConfig {
            k,
            restarts: Self::DEFAULT_RESTARTS,
            max_iters: Self::DEFAULT_MAX_ITERS,
            rel_tol: Self::DEFAULT_REL_TOL,
            seed,
        }
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidArgument("restarts and max_iters must be positive".into()));
        }
        if !(self.rel_tol >= 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("rel_tol must be non-negative, got {}", self.rel_tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansModel {
    pub k: usize,
    /// k × d.
    pub centroids: Matrix,
    pub assignments: Vec<usize>,
    /// Sum of squared distances from each point to its assigned centroid.
    pub inertia: f64,
    pub config: KMeansConfig,
    /// Lloyd iterations taken by the winning restart.
    pub iterations: usize,
}

impl KMeansModel {
    pub fn n(&self) -> usize {
        self.assignments.len()
    }

    pub fn dim(&self) -> usize {
        self.centroids.cols()
    }

    /// Index of the nearest centroid to `x`.
    pub fn nearest(&self, x: &[f64]) -> Result<usize> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(nearest_centroid(&self.centroids, x).0)
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        self.assignments.iter().for_each(|&a| sizes[a] += 1);
        sizes
    }
}

/// Nearest centroid and its squared distance; ties go to the lowest index.
#[inline]
pub fn nearest_centroid(centroids: &Matrix, x: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter_rows().enumerate() {
        let d = squared_distance(x, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// Σ‖xᵢ − c(assign(i))‖², summed in row order.
pub fn inertia(data: &Matrix, centroids: &Matrix, assignments: &[usize]) -> f64 {
    data.iter_rows()
        .zip(assignments)
        .map(|(x, &a)| squared_distance(x, centroids.row(a)))
        .sum()
}

pub fn kmeans_fit(data: &Matrix, cfg: &KMeansConfig) -> Result<KMeansModel> {
    kmeans_fit_traced(data, cfg).map(|(m, _)| m)
}

/// Like [`kmeans_fit`], also returning the per-iteration inertia of every
/// restart in restart order.
pub fn kmeans_fit_traced(data: &Matrix, cfg: &KMeansConfig) -> Result<(KMeansModel, Vec<Vec<f64>>)> {
    cfg.validate()?;
    let n = data.rows();
    if n < cfg.k {
        return Err(Error::InsufficientSamples { needed: cfg.k, got: n });
    }
    if data.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateData("non-finite value in data".into()));
    }
    if cfg.k >= 2 {
        let distinct = count_distinct_rows(data, cfg.k);
        if distinct == 1 {
            return Err(Error::DegenerateData("all points are identical".into()));
        }
        if distinct < cfg.k {
            return Err(Error::DegenerateData(format!(
                "{distinct} distinct points cannot form {} clusters",
                cfg.k
            )));
        }
    }

    let runs: Vec<Result<LloydRun>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_from_seed(derive_seed(cfg.seed, stream::KMEANS_RESTART, r as u64));
            let init = plus_plus_init(data, cfg.k, &mut rng);
            lloyd(data, init, cfg.max_iters, cfg.rel_tol)
        })
        .collect();

    let mut histories = Vec::with_capacity(runs.len());
    let mut best: Option<LloydRun> = None;
    for run in runs {
        let mut run = run?;
        histories.push(std::mem::take(&mut run.history));
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    let best = best.expect("restarts >= 1");
    Ok((
        KMeansModel {
            k: cfg.k,
            centroids: best.centroids,
            assignments: best.assignments,
            inertia: best.inertia,
            config: cfg.clone(),
            iterations: best.iterations,
        },
        histories,
    ))
}

/// Distinct rows, counting no further than `cap`.
fn count_distinct_rows(data: &Matrix, cap: usize) -> usize {
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    for r in data.iter_rows() {
        // +0.0 and -0.0 are the same point
        seen.insert(r.iter().map(|v| (v + 0.0).to_bits()).collect());
        if seen.len() >= cap {
            break;
        }
    }
    seen.len()
}

/// D²-weighted seeding. Requires at least `k` distinct rows.
fn plus_plus_init(data: &Matrix, k: usize, rng: &mut Rng) -> Matrix {
    let n = data.rows();
    let mut centroids = Matrix::zeros(k, data.cols());
    let first = rng.random_range(0..n);
    centroids.row_mut(0).copy_from_slice(data.row(first));

    let mut d2: Vec<f64> = data
        .iter_rows()
        .map(|x| squared_distance(x, centroids.row(0)))
        .collect();
    for j in 1..k {
        let total: f64 = d2.iter().sum();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = None;
        for (i, &w) in d2.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            acc += w;
            if acc > target {
                pick = Some(i);
                break;
            }
        }
        // rounding can leave target == total; fall back to the last candidate
        let pick = pick.unwrap_or_else(|| d2.iter().rposition(|&w| w > 0.0).unwrap_or(0));
        centroids.row_mut(j).copy_from_slice(data.row(pick));
        for (i, x) in data.iter_rows().enumerate() {
            d2[i] = d2[i].min(squared_distance(x, centroids.row(j)));
        }
    }
    centroids
}

struct LloydRun {
    centroids: Matrix,
    assignments: Vec<usize>,
    inertia: f64,
    iterations: usize,
    history: Vec<f64>,
}

fn assign_all(data: &Matrix, centroids: &Matrix, assign: &mut [usize], dist: &mut [f64]) {
    for (i, x) in data.iter_rows().enumerate() {
        let (j, d) = nearest_centroid(centroids, x);
        assign[i] = j;
        dist[i] = d;
    }
}

/// Re-seeds every empty cluster with the point farthest from its centroid,
/// taken from a cluster that has more than one member. Returns false if a
/// cluster was empty.
fn repair_empty(data: &Matrix, centroids: &mut Matrix, assign: &mut [usize], dist: &mut [f64]) -> bool {
    let k = centroids.rows();
    let mut sizes = vec![0usize; k];
    assign.iter().for_each(|&a| sizes[a] += 1);
    let mut was_full = true;
    for j in 0..k {
        if sizes[j] > 0 {
            continue;
        }
        was_full = false;
        let donor = (0..assign.len())
            .filter(|&i| sizes[assign[i]] > 1)
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if dist[b] >= dist[i] => Some(b),
                _ => Some(i),
            });
        let Some(i) = donor else { break };
        sizes[assign[i]] -= 1;
        sizes[j] = 1;
        assign[i] = j;
        dist[i] = 0.0;
        centroids.row_mut(j).copy_from_slice(data.row(i));
    }
    was_full
}

fn update_centroids(data: &Matrix, assign: &[usize], centroids: &mut Matrix) {
    let k = centroids.rows();
    let mut counts = vec![0usize; k];
    let mut sums = Matrix::zeros(k, data.cols());
    for (x, &a) in data.iter_rows().zip(assign) {
        counts[a] += 1;
        for (s, v) in sums.row_mut(a).iter_mut().zip(x) {
            *s += v;
        }
    }
    for j in 0..k {
        if counts[j] == 0 {
            continue;
        }
        let c = counts[j] as f64;
        for (dst, s) in centroids.row_mut(j).iter_mut().zip(sums.row(j)) {
            *dst = s / c;
        }
    }
}

fn lloyd(data: &Matrix, mut centroids: Matrix, max_iters: usize, rel_tol: f64) -> Result<LloydRun> {
    let n = data.rows();
    let mut assign = vec![0usize; n];
    let mut dist = vec![0.0; n];
    let mut history = Vec::new();
    let mut iterations = 0;

    for _ in 0..max_iters {
        assign_all(data, &centroids, &mut assign, &mut dist);
        repair_empty(data, &mut centroids, &mut assign, &mut dist);
        update_centroids(data, &assign, &mut centroids);
        let cur = inertia(data, &centroids, &assign);
        iterations += 1;
        let prev = history.last().copied();
        history.push(cur);
        match prev {
            Some(p) if p - cur <= rel_tol * p => break,
            _ if cur == 0.0 => break,
            _ => {}
        }
    }

    // Final pass so the stored assignment is exactly nearest-centroid. Any
    // repair strictly lowers inertia, so this settles quickly.
    let mut settled = false;
    for _ in 0..max_iters.max(n) {
        assign_all(data, &centroids, &mut assign, &mut dist);
        if repair_empty(data, &mut centroids, &mut assign, &mut dist) {
            settled = true;
            break;
        }
        update_centroids(data, &assign, &mut centroids);
    }
    if !settled {
        return Err(Error::DegenerateData("could not fill every cluster".into()));
    }
    let final_inertia = inertia(data, &centroids, &assign);
    if history.last() != Some(&final_inertia) {
        history.push(final_inertia);
    }
    Ok(LloydRun {
        centroids,
        assignments: assign,
        inertia: final_inertia,
        iterations,
        history,
    })
}

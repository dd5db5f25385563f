use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{ch_index, kmeans_fit, nearest_centroid, KMeansConfig};
use crate::error::{Error, Result};
use crate::eval::kfold::{shuffled_folds, Fold};
use crate::matrix::Matrix;
use crate::rng::{derive_seed, stream};

/// Which part of each fold the Calinski-Harabasz index is computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChScoring {
    /// Fit and score on the training portion.
    #[default]
    Train,
    /// Fit on the training portion, score the held-out portion after
    /// assigning it to the nearest fitted centroid.
    HeldOut,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectKConfig {
    pub k_min: usize,
    pub k_max: usize,
    pub folds: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub scoring: ChScoring,
}

impl SelectKConfig {
    pub fn new(k_min: usize, k_max: usize, folds: usize, seed: u64) -> Self {
        SelectKConfig {
            k_min,
            k_max,
            folds,
            seed,
            restarts: KMeansConfig::DEFAULT_RESTARTS,
            max_iters: KMeansConfig::DEFAULT_MAX_ITERS,
            rel_tol: KMeansConfig::DEFAULT_REL_TOL,
            scoring: ChScoring::Train,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_min < 2 {
            return Err(Error::InvalidArgument(format!("k_min must be at least 2, got {}", self.k_min)));
        }
        if self.k_max < self.k_min {
            return Err(Error::InvalidArgument(format!(
                "empty k range {}..={}",
                self.k_min, self.k_max
            )));
        }
        if self.folds < 2 {
            return Err(Error::InvalidArgument(format!("folds must be at least 2, got {}", self.folds)));
        }
        Ok(())
    }

    /// The folds every k is evaluated on.
    pub fn fold_plan(&self, n: usize) -> Result<Vec<Fold>> {
        shuffled_folds(n, self.folds, derive_seed(self.seed, stream::SELECT_K_FOLDS, 0))
    }

    /// K-means settings for cluster count `k` on fold `fold`.
    pub fn fold_kmeans_config(&self, k: usize, fold: usize) -> KMeansConfig {
        KMeansConfig {
            k,
            restarts: self.restarts,
            max_iters: self.max_iters,
            rel_tol: self.rel_tol,
            seed: derive_seed(self.seed, stream::SELECT_K_FIT, ((k as u64) << 32) | fold as u64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KSelectionResult {
    /// Mean index across folds.
    #[serde(serialize_with = "crate::serde_util::score_map")]
    pub per_k: BTreeMap<usize, f64>,
    #[serde(serialize_with = "crate::serde_util::score_list_map")]
    pub per_fold: BTreeMap<usize, Vec<f64>>,
    pub chosen_k: usize,
}

/// Largest score wins; ties go to the smallest k.
pub fn choose_k(per_k: &BTreeMap<usize, f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (&k, &s) in per_k {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((k, s));
        }
    }
    best.map(|(k, _)| k)
}

/// Cross-validated choice of k by the mean Calinski-Harabasz index.
pub fn select_k(data: &Matrix, cfg: &SelectKConfig) -> Result<KSelectionResult> {
    cfg.validate()?;
    let n = data.rows();
    let needed = cfg.folds * cfg.k_max;
    if n < needed {
        return Err(Error::InsufficientSamples { needed, got: n });
    }
    let folds = cfg.fold_plan(n)?;

    let jobs: Vec<(usize, usize)> = (cfg.k_min..=cfg.k_max)
        .flat_map(|k| (0..cfg.folds).map(move |f| (k, f)))
        .collect();
    let scores: Vec<Result<f64>> = jobs
        .par_iter()
        .map(|&(k, f)| score_fold(data, &folds[f], &cfg.fold_kmeans_config(k, f), cfg.scoring))
        .collect();

    let mut per_fold: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (&(k, _), s) in jobs.iter().zip(scores) {
        per_fold.entry(k).or_default().push(s?);
    }
    let per_k: BTreeMap<usize, f64> = per_fold
        .iter()
        .map(|(&k, v)| (k, v.iter().sum::<f64>() / v.len() as f64))
        .collect();
    let chosen_k = choose_k(&per_k).expect("non-empty k range");
    Ok(KSelectionResult {
        per_k,
        per_fold,
        chosen_k,
    })
}

fn score_fold(data: &Matrix, fold: &Fold, km: &KMeansConfig, scoring: ChScoring) -> Result<f64> {
    let train = data.select_rows(&fold.train);
    let model = kmeans_fit(&train, km)?;
    match scoring {
        ChScoring::Train => ch_index(&train, &model.assignments, km.k),
        ChScoring::HeldOut => {
            let test = data.select_rows(&fold.test);
            let assign: Vec<usize> = test
                .iter_rows()
                .map(|x| nearest_centroid(&model.centroids, x).0)
                .collect();
            ch_index(&test, &assign, km.k)
        }
    }
}

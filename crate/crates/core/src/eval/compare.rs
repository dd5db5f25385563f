use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::kfold::{kfold_split, Fold};
use super::{metrics_from_counts, roc_from_scores, ConfusionCounts, Metrics, RocCurve};
use crate::cluster::{kmeans_fit, KMeansConfig};
use crate::domain::{subset_first_k, CurriculumSpec, GradeMatrix};
use crate::error::{Error, Result};
use crate::predict::{cluster_classifier_train, logistic_fit, LogisticConfig};
use crate::rng::{derive_seed, stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Cluster,
    Logistic,
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassifierKind::Cluster => "cluster",
            ClassifierKind::Logistic => "logistic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureSet {
    Full,
    /// The first `n` courses of the pathway.
    FirstN(usize),
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureSet::Full => f.write_str("full"),
            FeatureSet::FirstN(n) => write!(f, "first-{n}"),
        }
    }
}

impl Serialize for FeatureSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareConfig {
    /// Cluster count of the co-cluster classifier.
    pub k: usize,
    pub first_n: usize,
    pub folds: usize,
    pub seed: u64,
    pub kmeans_restarts: usize,
    pub kmeans_max_iters: usize,
    pub kmeans_rel_tol: f64,
    pub logistic: LogisticConfig,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            k: 2,
            first_n: 3,
            folds: 5,
            seed: 0,
            kmeans_restarts: KMeansConfig::DEFAULT_RESTARTS,
            kmeans_max_iters: KMeansConfig::DEFAULT_MAX_ITERS,
            kmeans_rel_tol: KMeansConfig::DEFAULT_REL_TOL,
            logistic: LogisticConfig::default(),
        }
    }
}

impl CompareConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn kmeans_config(&self, set_index: usize, fold: usize) -> KMeansConfig {
        KMeansConfig {
            k: self.k,
            restarts: self.kmeans_restarts,
            max_iters: self.kmeans_max_iters,
            rel_tol: self.kmeans_rel_tol,
            seed: derive_seed(self.seed, stream::EVAL_FIT, ((set_index as u64) << 32) | fold as u64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub counts: ConfusionCounts,
    #[serde(flatten)]
    pub metrics: Metrics,
    pub roc: RocCurve,
}

impl EvalReport {
    pub fn accuracy(&self) -> f64 {
        self.metrics.accuracy
    }

    pub fn auc(&self) -> f64 {
        self.roc.auc
    }
}

/// One report from predictions pooled over every held-out fold.
pub fn evaluate_pooled(scores: &[f64], predicted: &[bool], labels: &[bool]) -> Result<EvalReport> {
    let counts = ConfusionCounts::from_predictions(predicted, labels)?;
    Ok(EvalReport {
        counts,
        metrics: metrics_from_counts(&counts)?,
        roc: roc_from_scores(scores, labels)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonCell {
    pub classifier: ClassifierKind,
    pub feature_set: FeatureSet,
    pub n_features: usize,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub cells: Vec<ComparisonCell>,
}

impl Comparison {
    pub fn get(&self, classifier: ClassifierKind, feature_set: FeatureSet) -> Option<&EvalReport> {
        self.cells
            .iter()
            .find(|c| c.classifier == classifier && c.feature_set == feature_set)
            .map(|c| &c.report)
    }
}

struct FoldOutput {
    test: Vec<usize>,
    cluster: Vec<(f64, bool)>,
    logistic: Vec<(f64, bool)>,
}

fn run_fold(m: &GradeMatrix, fold: &Fold, km: &KMeansConfig, lr: &LogisticConfig) -> Result<FoldOutput> {
    let x = m.features();
    let train = x.select_rows(&fold.train);
    let train_labels: Vec<bool> = fold.train.iter().map(|&i| m.labels()[i]).collect();

    let clusters = cluster_classifier_train(kmeans_fit(&train, km)?, &train_labels)?;
    let logistic = logistic_fit(&train, &train_labels, lr)?;

    let mut cluster = Vec::with_capacity(fold.test.len());
    let mut logit = Vec::with_capacity(fold.test.len());
    for &i in &fold.test {
        cluster.push(clusters.predict(x.row(i))?);
        logit.push(logistic.predict(x.row(i))?);
    }
    Ok(FoldOutput {
        test: fold.test.clone(),
        cluster,
        logistic: logit,
    })
}

/// Stratified k-fold comparison of both classifiers on the full course set
/// and on the first `cfg.first_n` pathway courses. Held-out predictions are
/// pooled across folds into one report per (classifier, feature set).
pub fn compare_classifiers(m: &GradeMatrix, spec: &CurriculumSpec, cfg: &CompareConfig) -> Result<Comparison> {
    if cfg.k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let labels = m.labels();
    let folds = kfold_split(m.n(), cfg.folds, labels, derive_seed(cfg.seed, stream::EVAL_FOLDS, 0))?;

    let sets = [
        (FeatureSet::FirstN(cfg.first_n), subset_first_k(m, spec, cfg.first_n)?),
        (FeatureSet::Full, m.clone()),
    ];

    let jobs: Vec<(usize, usize)> = (0..sets.len())
        .flat_map(|s| (0..folds.len()).map(move |f| (s, f)))
        .collect();
    let outputs: Vec<Result<FoldOutput>> = jobs
        .par_iter()
        .map(|&(s, f)| run_fold(&sets[s].1, &folds[f], &cfg.kmeans_config(s, f), &cfg.logistic))
        .collect();
    let mut outputs = outputs.into_iter();

    let n = m.n();
    let mut cells = Vec::with_capacity(4);
    for (feature_set, matrix) in &sets {
        let mut cluster = vec![(0.0, false); n];
        let mut logistic = vec![(0.0, false); n];
        for _ in 0..folds.len() {
            let out = outputs.next().expect("one output per job")?;
            for (j, &i) in out.test.iter().enumerate() {
                cluster[i] = out.cluster[j];
                logistic[i] = out.logistic[j];
            }
        }
        for (kind, pooled) in [(ClassifierKind::Logistic, logistic), (ClassifierKind::Cluster, cluster)] {
            let (scores, predicted): (Vec<f64>, Vec<bool>) = pooled.into_iter().unzip();
            cells.push(ComparisonCell {
                classifier: kind,
                feature_set: *feature_set,
                n_features: matrix.d(),
                report: evaluate_pooled(&scores, &predicted, labels)?,
            });
        }
    }
    Ok(Comparison { cells })
}

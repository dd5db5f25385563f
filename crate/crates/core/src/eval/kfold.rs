//! Seeded k-fold splits.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fold {
    /// Sorted ascending.
    pub train: Vec<usize>,
    /// Sorted ascending.
    pub test: Vec<usize>,
}

fn check_folds(folds: usize) -> Result<()> {
    if folds < 2 {
        return Err(Error::InvalidArgument(format!("folds must be at least 2, got {folds}")));
    }
    Ok(())
}

/// Deals `groups` (each already shuffled) round-robin into `folds` test sets.
/// The dealing position carries over from one group to the next so fold sizes
/// never differ by more than one.
fn deal(n: usize, folds: usize, groups: &[Vec<usize>]) -> Vec<Fold> {
    let mut tests = vec![Vec::new(); folds];
    let mut pos = 0;
    for g in groups {
        for &i in g {
            tests[pos % folds].push(i);
            pos += 1;
        }
    }
    tests
        .into_iter()
        .map(|mut test| {
            test.sort_unstable();
            let mut in_test = vec![false; n];
            test.iter().for_each(|&i| in_test[i] = true);
            let train = (0..n).filter(|&i| !in_test[i]).collect();
            Fold { train, test }
        })
        .collect()
}

/// Unstratified shuffled k-fold split of `0..n`.
pub fn shuffled_folds(n: usize, folds: usize, seed: u64) -> Result<Vec<Fold>> {
    check_folds(folds)?;
    if n < folds {
        return Err(Error::InsufficientSamples { needed: folds, got: n });
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng_from_seed(seed));
    Ok(deal(n, folds, &[idx]))
}

/// Stratified k-fold: every fold gets each class's share to within one sample.
pub fn kfold_split(n: usize, folds: usize, stratify_labels: &[bool], seed: u64) -> Result<Vec<Fold>> {
    check_folds(folds)?;
    if stratify_labels.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: stratify_labels.len(),
        });
    }
    let mut rng = rng_from_seed(seed);
    let mut groups = Vec::with_capacity(2);
    for class in [true, false] {
        let mut members: Vec<usize> = (0..n).filter(|&i| stratify_labels[i] == class).collect();
        if members.len() < folds {
            return Err(Error::InsufficientSamples {
                needed: folds,
                got: members.len(),
            });
        }
        members.shuffle(&mut rng);
        groups.push(members);
    }
    Ok(deal(n, folds, &groups))
}

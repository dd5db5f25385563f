//! Independent reference computations shared by the integration tests.

#![allow(dead_code)]

use attrition::matrix::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn test_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Between-cluster sum of squares from explicit centroids, and within-cluster
/// sum of squares from pairwise distances: `Σⱼ (1 / 2nⱼ) Σ_{a,b∈j} ‖xₐ − x_b‖²`.
pub fn brute_ssb_ssw(rows: &[Vec<f64>], assign: &[usize], k: usize) -> (f64, f64) {
    let d = rows[0].len();
    let n = rows.len() as f64;
    let mut grand = vec![0.0; d];
    for r in rows {
        for t in 0..d {
            grand[t] += r[t] / n;
        }
    }
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for j in 0..k {
        let members: Vec<&Vec<f64>> = rows.iter().zip(assign).filter(|(_, &a)| a == j).map(|(r, _)| r).collect();
        let nj = members.len() as f64;
        let mut c = vec![0.0; d];
        for r in &members {
            for t in 0..d {
                c[t] += r[t] / nj;
            }
        }
        ssb += nj * sq(&c, &grand);
        let mut pair = 0.0;
        for a in &members {
            for b in &members {
                pair += sq(a, b);
            }
        }
        ssw += pair / (2.0 * nj);
    }
    (ssb, ssw)
}

pub fn brute_ch(rows: &[Vec<f64>], assign: &[usize], k: usize) -> f64 {
    let (ssb, ssw) = brute_ssb_ssw(rows, assign, k);
    let n = rows.len() as f64;
    (ssb / (k as f64 - 1.0)) / (ssw / (n - k as f64))
}

/// Fraction of (positive, negative) pairs ranked correctly, ties counting half.
pub fn concordance(scores: &[f64], labels: &[bool]) -> f64 {
    let mut num = 0.0;
    let mut pairs = 0.0;
    for (i, &yi) in labels.iter().enumerate() {
        if !yi {
            continue;
        }
        for (j, &yj) in labels.iter().enumerate() {
            if yj {
                continue;
            }
            pairs += 1.0;
            if scores[i] > scores[j] {
                num += 1.0;
            } else if scores[i] == scores[j] {
                num += 0.5;
            }
        }
    }
    num / pairs
}

/// Smallest within-cluster sum of squares over every split into two
/// non-empty groups.
pub fn best_two_partition(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    let d = rows[0].len();
    let mut best = f64::INFINITY;
    // fixing point 0 in group A visits each unordered split once
    for mask in 0u32..(1 << (n - 1)) {
        let in_b = |i: usize| i > 0 && mask & (1 << (i - 1)) != 0;
        let mut cost = 0.0;
        let mut ok = true;
        for side in [false, true] {
            let members: Vec<&Vec<f64>> = (0..n).filter(|&i| in_b(i) == side).map(|i| &rows[i]).collect();
            if members.is_empty() {
                ok = false;
                break;
            }
            let m = members.len() as f64;
            let c: Vec<f64> = (0..d).map(|t| members.iter().map(|r| r[t]).sum::<f64>() / m).collect();
            cost += members.iter().map(|r| sq(r, &c)).sum::<f64>();
        }
        if ok {
            best = best.min(cost);
        }
    }
    best
}

pub fn random_rows(rng: &mut impl Rng, n: usize, d: usize, scale: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-scale..scale)).collect())
        .collect()
}

pub fn to_matrix(rows: &[Vec<f64>]) -> Matrix {
    Matrix::from_rows(rows).unwrap()
}

/// Random labels in `0..k`, each label used at least once.
pub fn random_assignment(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    loop {
        let a: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        if (0..k).all(|j| a.contains(&j)) {
            return a;
        }
    }
}

/// Scores with many exact ties: a small integer lattice, optionally shifted
/// upward for positives to vary the AUC.
pub fn tied_scores(rng: &mut impl Rng, n: usize, levels: u32) -> (Vec<f64>, Vec<bool>) {
    loop {
        let shift = rng.random_range(0..=levels / 2);
        let labels: Vec<bool> = (0..n).map(|_| rng.random_bool(0.4)).collect();
        if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
            continue;
        }
        let scores = labels
            .iter()
            .map(|&l| {
                let base = rng.random_range(0..levels);
                f64::from(if l { (base + shift).min(levels) } else { base }) / f64::from(levels)
            })
            .collect();
        return (scores, labels);
    }
}

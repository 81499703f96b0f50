//! Independent oracles shared by the integration tests. Nothing here calls
//! into the routine it checks.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Crossing indices by direct enumeration: the window mean is summed afresh
/// at every index, each index is classified on its own, and a crossing is any
/// index whose nonzero sign differs from the last nonzero sign before it.
/// Only meaningful for data whose window sums are exact (integers) or where
/// no deviation is close to zero.
pub fn brute_force_crossings(x: &[f64], n: usize) -> Option<Vec<usize>> {
    let sign_at = |t: usize| -> i8 {
        let sum: f64 = x[t + 1 - n..=t].iter().sum();
        let d = n as f64 * x[t] - sum;
        if d > 0.0 {
            1
        } else if d < 0.0 {
            -1
        } else {
            0
        }
    };
    let mut crossings = Vec::new();
    let mut any = false;
    for t in n - 1..x.len() {
        let s = sign_at(t);
        if s == 0 {
            continue;
        }
        any = true;
        let previous = (n - 1..t).rev().map(sign_at).find(|&p| p != 0);
        if matches!(previous, Some(p) if p != s) {
            crossings.push(t);
        }
    }
    any.then_some(crossings)
}

/// Best Sharpe ratio over the simplex grid with the given resolution.
pub fn grid_sharpe(means: &[f64], cov: &[Vec<f64>], rf: f64, steps: usize) -> f64 {
    let k = means.len();
    let mut best = f64::NEG_INFINITY;
    let mut counts = vec![0usize; k];
    fn recurse(i: usize, left: usize, counts: &mut Vec<usize>, eval: &mut dyn FnMut(&[usize])) {
        if i + 1 == counts.len() {
            counts[i] = left;
            eval(counts);
            return;
        }
        for c in 0..=left {
            counts[i] = c;
            recurse(i + 1, left - c, counts, eval);
        }
    }
    let mut eval = |c: &[usize]| {
        let w: Vec<f64> = c.iter().map(|&v| v as f64 / steps as f64).collect();
        let ret: f64 = w.iter().zip(means).map(|(a, b)| a * b).sum();
        let mut var = 0.0;
        for i in 0..k {
            for j in 0..k {
                var += w[i] * w[j] * cov[i][j];
            }
        }
        if var > 0.0 {
            best = best.max((ret - rf) / var.sqrt());
        }
    };
    recurse(0, steps, &mut counts, &mut eval);
    best
}

/// Random instance: `k` assets with a covariance built as `B Bᵀ + diag`.
pub fn random_instance(rng: &mut ChaCha8Rng, k: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let means: Vec<f64> = (0..k).map(|_| rng.random_range(-0.02..0.12)).collect();
    let b: Vec<Vec<f64>> = (0..k)
        .map(|_| (0..k).map(|_| rng.random_range(-0.2..0.2)).collect())
        .collect();
    let mut cov = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            cov[i][j] = (0..k).map(|l| b[i][l] * b[j][l]).sum();
        }
        cov[i][i] += rng.random_range(0.001..0.05);
    }
    (means, cov)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gaussian random walk with a deterministic seed.
pub fn random_walk(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut x = 0.0;
    (0..len)
        .map(|_| {
            x += rng.sample::<f64, _>(rand_distr::StandardNormal);
            x
        })
        .collect()
}

/// Small-integer series with frequent exact ties against the moving average.
pub fn integer_series(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(0..4) as f64).collect()
}

pub fn mean_abs_difference(
    a: &[(usize, f64)],
    b: &[(usize, f64)],
    tau_limit: usize,
) -> Option<f64> {
    let diffs: Vec<f64> = a
        .iter()
        .filter(|(t, _)| *t <= tau_limit)
        .filter_map(|(t, s)| b.iter().find(|(u, _)| u == t).map(|(_, r)| (s - r).abs()))
        .collect();
    (!diffs.is_empty()).then(|| diffs.iter().sum::<f64>() / diffs.len() as f64)
}

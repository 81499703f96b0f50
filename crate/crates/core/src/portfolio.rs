//! Long-only maximum Sharpe ratio portfolio, the comparison baseline for the
//! entropy-derived weights.
//!
//! For panels of up to [`ENUMERATION_LIMIT`] assets the optimum is found
//! exactly: on every support set `S` the tangency direction
//! `y = Σ_S⁻¹ (μ_S − r_f)` is a KKT candidate when strictly positive, and the
//! best candidate is the global maximizer. Larger panels use projected
//! gradient ascent on the simplex from several starts, polished by the exact
//! solve on the support that ascent settles on.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, Matrix};
use crate::scalar::Scalar;

pub const ENUMERATION_LIMIT: usize = 16;

const PIVOT_TOL: f64 = 1e-12;

/// Returns by time (rows) and asset (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct AssetPanel<T> {
    pub labels: Vec<String>,
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> AssetPanel<T> {
    pub fn new(labels: Vec<String>, rows: Vec<Vec<T>>) -> Result<Self> {
        if rows.len() < 2 || rows.iter().any(|r| r.len() != labels.len()) || labels.is_empty() {
            return Err(Error::TooFewRows);
        }
        Ok(Self { labels, rows })
    }

    /// Builds a panel from per-asset return columns, truncated to the shortest column.
    pub fn from_columns(labels: Vec<String>, columns: &[Vec<T>]) -> Result<Self> {
        let len = columns.iter().map(Vec::len).min().unwrap_or(0);
        let rows = (0..len)
            .map(|t| columns.iter().map(|c| c[t]).collect())
            .collect();
        Self::new(labels, rows)
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn assets(&self) -> usize {
        self.labels.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PanelStats<T> {
    pub means: Vec<T>,
    pub covariance: Matrix<T>,
}

impl<T: Scalar> PanelStats<T> {
    pub fn new(means: Vec<T>, covariance: Matrix<T>) -> Self {
        assert_eq!(covariance.rows(), means.len());
        assert_eq!(covariance.cols(), means.len());
        Self { means, covariance }
    }

    pub fn assets(&self) -> usize {
        self.means.len()
    }
}

/// Sample means and the `(rows − 1)`-normalized sample covariance.
pub fn panel_stats<T: Scalar>(panel: &AssetPanel<T>) -> Result<PanelStats<T>> {
    let rows = panel.rows();
    let k = panel.assets();
    if rows.len() < 2 {
        return Err(Error::TooFewRows);
    }
    let n = T::of_usize(rows.len());
    let means: Vec<T> = (0..k)
        .map(|j| rows.iter().map(|r| r[j]).sum::<T>() / n)
        .collect();
    let mut cov = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let c = rows
                .iter()
                .map(|r| (r[i] - means[i]) * (r[j] - means[j]))
                .sum::<T>()
                / (n - T::one());
            cov.set(i, j, c);
            cov.set(j, i, c);
        }
    }
    Ok(PanelStats::new(means, cov))
}

/// `(wᵀμ − r_f) / sqrt(wᵀΣw)`.
pub fn sharpe_ratio<T: Scalar>(
    weights: &[T],
    stats: &PanelStats<T>,
    risk_free_rate: T,
) -> Result<T> {
    let variance = stats.covariance.quadratic_form(weights);
    if !(variance > T::zero()) {
        return Err(Error::ZeroVariancePortfolio);
    }
    let ret: T = weights.iter().zip(&stats.means).map(|(&w, &m)| w * m).sum();
    Ok((ret - risk_free_rate) / variance.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionStatus {
    Optimal,
    /// No asset earns more than the risk-free rate; the minimum-variance
    /// simplex point is returned instead.
    NoFeasibleImprovement,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SharpeSolution<T> {
    pub weights: Vec<T>,
    pub sharpe: T,
    pub risk_free_rate: T,
    pub status: SolutionStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SharpeMethod {
    /// Exact enumeration up to [`ENUMERATION_LIMIT`] assets, projected ascent beyond.
    Auto,
    Enumerate,
    ProjectedAscent,
}

pub fn maximize_sharpe<T: Scalar>(
    stats: &PanelStats<T>,
    risk_free_rate: T,
) -> Result<SharpeSolution<T>> {
    maximize_sharpe_with(stats, risk_free_rate, SharpeMethod::Auto)
}

pub fn maximize_sharpe_with<T: Scalar>(
    stats: &PanelStats<T>,
    risk_free_rate: T,
    method: SharpeMethod,
) -> Result<SharpeSolution<T>> {
    let k = stats.assets();
    if k == 0 {
        return Err(Error::EmptySet);
    }
    let excess: Vec<T> = stats.means.iter().map(|&m| m - risk_free_rate).collect();
    for (i, &e) in excess.iter().enumerate() {
        let var = stats.covariance.get(i, i);
        if !(var > T::zero()) && e > T::zero() {
            return Err(Error::ZeroVariancePortfolio);
        }
    }
    if excess.iter().all(|&e| e <= T::zero()) {
        let weights = min_variance(stats)?;
        let sharpe = sharpe_ratio(&weights, stats, risk_free_rate)?;
        return Ok(SharpeSolution {
            weights,
            sharpe,
            risk_free_rate,
            status: SolutionStatus::NoFeasibleImprovement,
        });
    }

    let use_enumeration = match method {
        SharpeMethod::Auto => k <= ENUMERATION_LIMIT,
        SharpeMethod::Enumerate => true,
        SharpeMethod::ProjectedAscent => false,
    };
    let weights = if use_enumeration {
        enumerate_supports(stats, &excess, risk_free_rate)
    } else {
        projected_ascent(stats, &excess, risk_free_rate)
    }
    .ok_or(Error::ZeroVariancePortfolio)?;
    let sharpe = sharpe_ratio(&weights, stats, risk_free_rate)?;
    Ok(SharpeSolution {
        weights,
        sharpe,
        risk_free_rate,
        status: SolutionStatus::Optimal,
    })
}

/// Puts `weights` exactly on the simplex: negatives clipped, renormalized.
fn normalize<T: Scalar>(mut weights: Vec<T>) -> Option<Vec<T>> {
    for w in weights.iter_mut() {
        *w = w.max(T::zero());
    }
    let total: T = weights.iter().copied().sum();
    if !(total > T::zero()) {
        return None;
    }
    weights.iter_mut().for_each(|w| *w = *w / total);
    Some(weights)
}

/// Strictly positive solution of `Σ_S y = rhs_S`, scattered back to full width.
fn support_solution<T: Scalar>(
    stats: &PanelStats<T>,
    support: &[usize],
    rhs: &[T],
) -> Option<Vec<T>> {
    let sub = stats.covariance.principal(support);
    let local: Vec<T> = support.iter().map(|&i| rhs[i]).collect();
    let y = cholesky_solve(&sub, &local, T::of(PIVOT_TOL))?;
    if y.iter().any(|&v| !(v > T::zero())) {
        return None;
    }
    let mut full = vec![T::zero(); stats.assets()];
    for (&i, &v) in support.iter().zip(&y) {
        full[i] = v;
    }
    normalize(full)
}

fn support_of(mask: usize, k: usize) -> Vec<usize> {
    (0..k).filter(|i| mask & (1 << i) != 0).collect()
}

/// Keeps the higher score; near-ties go to the lexicographically larger weights.
fn better<T: Scalar>(
    candidate: (T, Vec<T>),
    best: Option<(T, Vec<T>)>,
    maximize: bool,
) -> Option<(T, Vec<T>)> {
    let Some(best) = best else {
        return Some(candidate);
    };
    let tol = T::of(1e-13) * best.0.abs().max(T::one());
    let diff = if maximize {
        candidate.0 - best.0
    } else {
        best.0 - candidate.0
    };
    let wins = diff > tol
        || (diff.abs() <= tol
            && candidate
                .1
                .iter()
                .zip(&best.1)
                .find(|(a, b)| a != b)
                .is_some_and(|(a, b)| a > b));
    Some(if wins { candidate } else { best })
}

fn enumerate_supports<T: Scalar>(stats: &PanelStats<T>, excess: &[T], rf: T) -> Option<Vec<T>> {
    let k = stats.assets();
    let candidates: Vec<(T, Vec<T>)> = (1usize..(1 << k))
        .into_par_iter()
        .filter_map(|mask| {
            let w = support_solution(stats, &support_of(mask, k), excess)?;
            let s = sharpe_ratio(&w, stats, rf).ok()?;
            Some((s, w))
        })
        .collect();
    candidates
        .into_iter()
        .fold(None, |best, c| better(c, best, true))
        .map(|(_, w)| w)
}

fn min_variance<T: Scalar>(stats: &PanelStats<T>) -> Result<Vec<T>> {
    let k = stats.assets();
    if k > ENUMERATION_LIMIT {
        return Ok(descend_variance(stats));
    }
    let ones = vec![T::one(); k];
    let mut best = None;
    for mask in 1usize..(1 << k) {
        if let Some(w) = support_solution(stats, &support_of(mask, k), &ones) {
            best = better((stats.covariance.quadratic_form(&w), w), best, false);
        }
    }
    best.map(|(_, w)| w).ok_or(Error::ZeroVariancePortfolio)
}

/// Projected gradient descent on `wᵀΣw`, step `1 / (2 tr Σ)`.
fn descend_variance<T: Scalar>(stats: &PanelStats<T>) -> Vec<T> {
    let k = stats.assets();
    let trace: T = (0..k).map(|i| stats.covariance.get(i, i)).sum();
    let step = T::one() / (T::of(2.0) * trace);
    let mut w = vec![T::one() / T::of_usize(k); k];
    for _ in 0..20_000 {
        let g = stats.covariance.mul_vec(&w);
        let next = project_simplex(
            &w.iter()
                .zip(&g)
                .map(|(&a, &b)| a - step * (b + b))
                .collect::<Vec<_>>(),
        );
        let moved = next
            .iter()
            .zip(&w)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
        w = next;
        if moved < T::of(1e-15) {
            break;
        }
    }
    w
}

/// Euclidean projection onto the probability simplex.
fn project_simplex<T: Scalar>(v: &[T]) -> Vec<T> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite weights"));
    let mut cumulative = T::zero();
    let mut theta = T::zero();
    for (i, &u) in sorted.iter().enumerate() {
        cumulative = cumulative + u;
        let candidate = (cumulative - T::one()) / T::of_usize(i + 1);
        if u - candidate > T::zero() {
            theta = candidate;
        }
    }
    v.iter().map(|&x| (x - theta).max(T::zero())).collect()
}

fn ascend<T: Scalar>(
    stats: &PanelStats<T>,
    excess: &[T],
    rf: T,
    start: Vec<T>,
) -> Option<(T, Vec<T>)> {
    let k = stats.assets();
    let mut w = start;
    let mut value = sharpe_ratio(&w, stats, rf).ok()?;
    let mut step = T::one();
    for _ in 0..5000 {
        let sw = stats.covariance.mul_vec(&w);
        let var: T = w.iter().zip(&sw).map(|(&a, &b)| a * b).sum();
        let ret: T = w.iter().zip(excess).map(|(&a, &b)| a * b).sum();
        let sd = var.sqrt();
        let grad: Vec<T> = (0..k)
            .map(|i| excess[i] / sd - ret * sw[i] / (var * sd))
            .collect();
        let mut improved = false;
        while step > T::of(1e-14) {
            let trial: Vec<T> = w.iter().zip(&grad).map(|(&a, &g)| a + step * g).collect();
            let trial = project_simplex(&trial);
            if let Ok(v) = sharpe_ratio(&trial, stats, rf) {
                if v > value {
                    let gain = v - value;
                    w = trial;
                    value = v;
                    improved = gain > T::of(1e-15) * value.abs().max(T::one());
                    step = step * T::of(2.0);
                    break;
                }
            }
            step = step / T::of(2.0);
        }
        if !improved {
            break;
        }
    }
    Some((value, w))
}

fn projected_ascent<T: Scalar>(stats: &PanelStats<T>, excess: &[T], rf: T) -> Option<Vec<T>> {
    let k = stats.assets();
    let mut starts = vec![vec![T::one() / T::of_usize(k); k]];
    for i in 0..k {
        if excess[i] > T::zero() {
            let mut v = vec![T::zero(); k];
            v[i] = T::one();
            starts.push(v);
        }
    }
    let results: Vec<(T, Vec<T>)> = starts
        .into_par_iter()
        .filter_map(|s| ascend(stats, excess, rf, s))
        .collect();
    let (value, w) = results
        .into_iter()
        .fold(None, |best, c| better(c, best, true))?;
    // polish on the support ascent converged to
    let support: Vec<usize> = (0..k).filter(|&i| w[i] > T::of(1e-9)).collect();
    match support_solution(stats, &support, excess) {
        Some(exact) if sharpe_ratio(&exact, stats, rf).is_ok_and(|s| s >= value) => Some(exact),
        _ => normalize(w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_stats(means: &[f64], vars: &[f64]) -> PanelStats<f64> {
        let mut cov = Matrix::zeros(means.len(), means.len());
        for (i, &v) in vars.iter().enumerate() {
            cov.set(i, i, v);
        }
        PanelStats::new(means.to_vec(), cov)
    }

    #[test]
    fn sharpe_examples() {
        let one = diag_stats(&[0.1], &[0.04]);
        assert!((sharpe_ratio(&[1.0], &one, 0.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(sharpe_ratio(&[1.0], &one, 0.1).unwrap(), 0.0);
        let two = diag_stats(&[0.1, 0.1], &[0.04, 0.04]);
        let s = sharpe_ratio(&[0.5, 0.5], &two, 0.0).unwrap();
        assert!((s - 0.1 / 0.02f64.sqrt()).abs() < 1e-14);
        assert!(matches!(
            sharpe_ratio(&[1.0], &diag_stats(&[0.1], &[0.0]), 0.0),
            Err(Error::ZeroVariancePortfolio)
        ));
    }

    #[test]
    fn single_asset_takes_everything() {
        let sol = maximize_sharpe(&diag_stats(&[0.05], &[0.01]), 0.0).unwrap();
        assert_eq!(sol.weights, vec![1.0]);
        assert_eq!(sol.status, SolutionStatus::Optimal);
    }

    #[test]
    fn symmetric_pair_splits_evenly() {
        let stats = diag_stats(&[0.1, 0.1], &[0.04, 0.04]);
        for method in [SharpeMethod::Enumerate, SharpeMethod::ProjectedAscent] {
            let sol = maximize_sharpe_with(&stats, 0.0, method).unwrap();
            let reference = sharpe_ratio(&[0.5, 0.5], &stats, 0.0).unwrap();
            assert!((sol.sharpe - reference).abs() < 1e-9, "{method:?}");
        }
    }

    #[test]
    fn no_asset_beats_risk_free_rate() {
        let stats = diag_stats(&[0.01, 0.02], &[0.04, 0.01]);
        let sol = maximize_sharpe(&stats, 0.05).unwrap();
        assert_eq!(sol.status, SolutionStatus::NoFeasibleImprovement);
        // minimum variance of independent assets: w ∝ 1/σ²
        assert!((sol.weights[0] - 0.2).abs() < 1e-12 && (sol.weights[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn riskless_asset_with_premium_is_an_error() {
        let stats = diag_stats(&[0.1, 0.05], &[0.0, 0.01]);
        assert!(matches!(
            maximize_sharpe(&stats, 0.0),
            Err(Error::ZeroVariancePortfolio)
        ));
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5f64, 0.5, 0.5]);
        assert!(p.iter().all(|&v| (v - 1.0 / 3.0).abs() < 1e-15));
        assert_eq!(project_simplex(&[2.0f64, 0.0, -1.0]), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn panel_statistics() {
        let panel = AssetPanel::new(
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 1.0], vec![3.0, 3.0], vec![5.0, 5.0]],
        )
        .unwrap();
        let stats = panel_stats(&panel).unwrap();
        assert_eq!(stats.means, vec![3.0, 3.0]);
        assert!(stats
            .covariance
            .to_rows()
            .iter()
            .flatten()
            .all(|&c| c == 4.0));

        let flat = AssetPanel::new(vec!["a".into(), "b".into()], vec![vec![2.0, 7.0]; 5]).unwrap();
        assert!(panel_stats(&flat)
            .unwrap()
            .covariance
            .to_rows()
            .iter()
            .flatten()
            .all(|&c| c == 0.0));
        assert!(matches!(
            AssetPanel::<f64>::new(vec!["a".into()], vec![vec![1.0]]),
            Err(Error::TooFewRows)
        ));
    }
}

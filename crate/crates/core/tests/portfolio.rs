mod common;

use macent::linalg::Matrix;
use macent::portfolio::{
    maximize_sharpe, maximize_sharpe_with, panel_stats, sharpe_ratio, AssetPanel, PanelStats,
    SharpeMethod, SolutionStatus,
};
use macent::Error;
use rand::Rng;

fn stats(means: &[f64], cov: &[Vec<f64>]) -> PanelStats<f64> {
    PanelStats::new(means.to_vec(), Matrix::from_rows(cov))
}

#[test]
fn solver_beats_the_simplex_grid() {
    let mut rng = common::rng(100);
    for i in 0..60 {
        let k = 2 + i % 3;
        let (means, cov) = common::random_instance(&mut rng, k);
        let rf = rng.random_range(-0.01..0.02);
        if means.iter().all(|&m| m <= rf) {
            continue;
        }
        let sol = maximize_sharpe(&stats(&means, &cov), rf).unwrap();
        let grid = common::grid_sharpe(&means, &cov, rf, 100);
        assert!(
            sol.sharpe >= grid - 1e-6,
            "instance {i}: {} < {grid}",
            sol.sharpe
        );
        assert!((sol.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!(sol.weights.iter().all(|&w| w >= 0.0));
    }
}

#[test]
fn sharpe_is_scale_invariant() {
    let mut rng = common::rng(101);
    for _ in 0..20 {
        let (means, cov) = common::random_instance(&mut rng, 4);
        let c = rng.random_range(0.1..10.0);
        let rf = 0.001;
        let base = maximize_sharpe(&stats(&means, &cov), rf).unwrap();
        let scaled_means: Vec<f64> = means.iter().map(|m| c * m).collect();
        let scaled_cov: Vec<Vec<f64>> = cov
            .iter()
            .map(|r| r.iter().map(|v| c * c * v).collect())
            .collect();
        let scaled = maximize_sharpe(&stats(&scaled_means, &scaled_cov), c * rf).unwrap();
        assert!((base.sharpe - scaled.sharpe).abs() <= 1e-9 * base.sharpe.abs().max(1.0));
        for (a, b) in base.weights.iter().zip(&scaled.weights) {
            assert!((a - b).abs() <= 1e-9);
        }
    }
}

#[test]
fn sample_moments_match_a_direct_computation() {
    let mut rng = common::rng(102);
    let rows: Vec<Vec<f64>> = (0..100_000)
        .map(|_| {
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            let e: f64 = rng.sample(rand_distr::StandardNormal);
            vec![0.01 + 0.1 * z, 0.02 + 0.05 * z + 0.05 * e]
        })
        .collect();
    let panel = AssetPanel::new(vec!["a".into(), "b".into()], rows.clone()).unwrap();
    let s = panel_stats(&panel).unwrap();
    assert!((s.means[0] - 0.01).abs() < 0.002 && (s.means[1] - 0.02).abs() < 0.001);
    assert!((s.covariance.get(0, 0) - 0.01).abs() < 5e-4);
    assert!((s.covariance.get(0, 1) - 0.005).abs() < 3e-4);
    assert!((s.covariance.get(1, 1) - 0.005).abs() < 2e-4);

    let m0 = rows.iter().map(|r| r[0]).sum::<f64>() / rows.len() as f64;
    let m1 = rows.iter().map(|r| r[1]).sum::<f64>() / rows.len() as f64;
    let c01 = rows.iter().map(|r| (r[0] - m0) * (r[1] - m1)).sum::<f64>() / (rows.len() - 1) as f64;
    assert!((s.covariance.get(0, 1) - c01).abs() <= 1e-12);
}

#[test]
fn duplicate_columns_are_handled() {
    let mut rng = common::rng(103);
    let col: Vec<f64> = (0..500)
        .map(|_| 0.01 + rng.random_range(-0.05..0.05))
        .collect();
    let other: Vec<f64> = (0..500).map(|_| rng.random_range(-0.05..0.05)).collect();
    let panel = AssetPanel::from_columns(
        vec!["a".into(), "a2".into(), "b".into()],
        &[col.clone(), col, other],
    )
    .unwrap();
    let s = panel_stats(&panel).unwrap();
    let sol = maximize_sharpe(&s, 0.0).unwrap();
    assert_eq!(sol.status, SolutionStatus::Optimal);
    assert!((sol.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    let direct = sharpe_ratio(&sol.weights, &s, 0.0).unwrap();
    assert!((direct - sol.sharpe).abs() <= 1e-12);
}

#[test]
fn dominated_asset_gets_no_weight() {
    // asset 1 has the same risk as asset 0, perfectly correlated, lower mean
    let cov = vec![
        vec![0.04, 0.04, 0.0],
        vec![0.04, 0.04, 0.0],
        vec![0.0, 0.0, 0.09],
    ];
    let sol = maximize_sharpe(&stats(&[0.1, 0.05, 0.08], &cov), 0.0).unwrap();
    assert_eq!(sol.weights[1], 0.0);
    assert!(sol.weights[0] > 0.0 && sol.weights[2] > 0.0);
}

#[test]
fn no_asset_above_the_risk_free_rate_falls_back_to_minimum_variance() {
    let cov = vec![vec![0.04, 0.0], vec![0.0, 0.01]];
    let sol = maximize_sharpe(&stats(&[0.01, 0.02], &cov), 0.05).unwrap();
    assert_eq!(sol.status, SolutionStatus::NoFeasibleImprovement);
    assert!((sol.weights[0] - 0.2).abs() <= 1e-9 && (sol.weights[1] - 0.8).abs() <= 1e-9);
}

#[test]
fn riskless_asset_with_positive_excess_is_an_error() {
    let cov = vec![vec![0.0, 0.0], vec![0.0, 0.01]];
    assert!(matches!(
        maximize_sharpe(&stats(&[0.05, 0.02], &cov), 0.0),
        Err(Error::ZeroVariancePortfolio)
    ));
}

#[test]
fn enumeration_and_ascent_agree() {
    let mut rng = common::rng(104);
    for _ in 0..10 {
        let (means, cov) = common::random_instance(&mut rng, 8);
        let s = stats(&means, &cov);
        let exact = maximize_sharpe_with(&s, 0.0, SharpeMethod::Enumerate).unwrap();
        let ascent = maximize_sharpe_with(&s, 0.0, SharpeMethod::ProjectedAscent).unwrap();
        assert!(
            (exact.sharpe - ascent.sharpe).abs() <= 1e-8,
            "{} vs {}",
            exact.sharpe,
            ascent.sharpe
        );
    }
}

#[test]
fn large_panels_use_ascent() {
    let mut rng = common::rng(105);
    let (means, cov) = common::random_instance(&mut rng, 20);
    let sol = maximize_sharpe(&stats(&means, &cov), 0.0).unwrap();
    assert!((sol.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    // no single-asset portfolio does better
    for i in 0..20 {
        let mut e = vec![0.0; 20];
        e[i] = 1.0;
        assert!(sharpe_ratio(&e, &stats(&means, &cov), 0.0).unwrap() <= sol.sharpe + 1e-12);
    }
}

#[test]
fn short_panels_are_rejected() {
    assert!(matches!(
        AssetPanel::new(vec!["a".into()], vec![vec![1.0]]),
        Err(Error::TooFewRows)
    ));
}

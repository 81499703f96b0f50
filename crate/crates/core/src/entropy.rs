//! Empirical duration distribution `P(τ, n)` and the entropy curve
//! `S(τ, n) = −ln P(τ, n)`.
//!
//! Durations are counted in exact integer classes with no binning; classes
//! that never occur are absent from the support. The curve is modelled as
//! `S₀ + α ln τ + τ/n`, the negative logarithm of a power law with an
//! exponential cut-off at the moving-average window.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{fit_line, least_squares, Matrix};
use crate::partition::ClusterPartition;
use crate::scalar::Scalar;

/// Log-log RMS residual above which a power-law fit is reported as a model mismatch.
pub const POWER_LAW_MISMATCH_RMS: f64 = 0.25;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DurationDistribution<T> {
    pub window: usize,
    pub support: Vec<usize>,
    pub counts: Vec<u64>,
    pub probabilities: Vec<T>,
}

impl<T: Scalar> DurationDistribution<T> {
    /// Builds the distribution from raw durations.
    pub fn from_durations(window: usize, durations: &[usize]) -> Result<Self> {
        if durations.is_empty() {
            return Err(Error::EmptyPartition);
        }
        let mut hist: BTreeMap<usize, u64> = BTreeMap::new();
        for &d in durations {
            *hist.entry(d).or_default() += 1;
        }
        let total = T::of_usize(durations.len());
        let (support, counts): (Vec<_>, Vec<_>) = hist.into_iter().unzip();
        let probabilities = counts.iter().map(|&c| T::of(c as f64) / total).collect();
        Ok(Self {
            window,
            support,
            counts,
            probabilities,
        })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Largest observed duration.
    pub fn tau_max(&self) -> usize {
        self.support.last().copied().unwrap_or(0)
    }
}

pub fn duration_distribution<T: Scalar>(
    partition: &ClusterPartition,
) -> Result<DurationDistribution<T>> {
    DurationDistribution::from_durations(partition.window, &partition.durations)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyCurve<T> {
    pub window: usize,
    pub support: Vec<usize>,
    /// Self-information `−ln P(τ)` per support class, in nats.
    pub values: Vec<T>,
    /// Shannon entropy `−Σ P ln P`, the `P`-weighted mean of `values`.
    pub shannon: T,
}

pub fn entropy_curve<T: Scalar>(dist: &DurationDistribution<T>) -> EntropyCurve<T> {
    let values: Vec<T> = dist
        .probabilities
        .iter()
        .map(|&p| if p >= T::one() { T::zero() } else { -p.ln() })
        .collect();
    let shannon = dist
        .probabilities
        .iter()
        .zip(&values)
        .map(|(&p, &s)| p * s)
        .sum();
    EntropyCurve {
        window: dist.window,
        support: dist.support.clone(),
        values,
        shannon,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerLawFit<T> {
    pub alpha: T,
    pub intercept: T,
    pub fit_range: (usize, usize),
    pub points: usize,
    /// RMS residual of `ln P` against the fitted line.
    pub residual: T,
}

impl<T: Scalar> PowerLawFit<T> {
    pub fn is_mismatch(&self) -> bool {
        self.residual > T::of(POWER_LAW_MISMATCH_RMS)
    }
}

/// Default power-law range `[2, n/2]`, which stays clear of the exponential shoulder.
pub fn default_power_law_range(window: usize) -> (usize, usize) {
    (2, (window / 2).max(3))
}

/// Least-squares slope of `ln P` against `ln τ` for `τ` in the inclusive range.
pub fn fit_power_law<T: Scalar>(
    dist: &DurationDistribution<T>,
    fit_range: (usize, usize),
) -> Result<PowerLawFit<T>> {
    let (lo, hi) = fit_range;
    let (x, y): (Vec<T>, Vec<T>) = dist
        .support
        .iter()
        .zip(&dist.probabilities)
        .filter(|(&tau, _)| tau >= lo && tau <= hi)
        .map(|(&tau, &p)| (T::of_usize(tau).ln(), p.ln()))
        .unzip();
    if x.len() < 3 || lo >= hi {
        return Err(Error::InsufficientSupport {
            have: x.len(),
            need: 3,
        });
    }
    let (slope, intercept, residual) = fit_line(&x, &y).ok_or(Error::InsufficientSupport {
        have: x.len(),
        need: 3,
    })?;
    Ok(PowerLawFit {
        alpha: -slope,
        intercept,
        fit_range,
        points: x.len(),
        residual,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyModelFit<T> {
    pub s0: T,
    pub alpha: T,
    pub inv_n: T,
    pub points: usize,
    pub residual: T,
}

/// Fits `S(τ) = S₀ + α ln τ + inv_n·τ` over the whole support.
pub fn fit_entropy_model<T: Scalar>(curve: &EntropyCurve<T>) -> Result<EntropyModelFit<T>> {
    fit_entropy_model_in(curve, (1, usize::MAX))
}

/// Same as [`fit_entropy_model`] restricted to `τ` in the inclusive range.
/// The retained support must reach both sides of the window `n`.
pub fn fit_entropy_model_in<T: Scalar>(
    curve: &EntropyCurve<T>,
    fit_range: (usize, usize),
) -> Result<EntropyModelFit<T>> {
    let (lo, hi) = fit_range;
    let points: Vec<(usize, T)> = curve
        .support
        .iter()
        .zip(&curve.values)
        .filter(|(&tau, _)| tau >= lo && tau <= hi)
        .map(|(&tau, &s)| (tau, s))
        .collect();
    let insufficient = Error::InsufficientSupport {
        have: points.len(),
        need: 3,
    };
    let spans = points.first().is_some_and(|p| p.0 < curve.window)
        && points.last().is_some_and(|p| p.0 > curve.window);
    if points.len() < 3 || !spans {
        return Err(insufficient);
    }
    let rows: Vec<Vec<T>> = points
        .iter()
        .map(|&(tau, _)| {
            let t = T::of_usize(tau);
            vec![T::one(), t.ln(), t]
        })
        .collect();
    let target: Vec<T> = points.iter().map(|p| p.1).collect();
    let fit = least_squares(&Matrix::from_rows(&rows), &target).ok_or(insufficient)?;
    Ok(EntropyModelFit {
        s0: fit.coefficients[0],
        alpha: fit.coefficients[1],
        inv_n: fit.coefficients[2],
        points: points.len(),
        residual: fit.rms_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist_from(durations: &[usize]) -> DurationDistribution<f64> {
        DurationDistribution::from_durations(10, durations).unwrap()
    }

    /// Distribution with exactly the given (unnormalized) weights on `1..=len`.
    fn tabulated(
        window: usize,
        weight: impl Fn(f64) -> f64,
        len: usize,
    ) -> DurationDistribution<f64> {
        let w: Vec<f64> = (1..=len).map(|t| weight(t as f64)).collect();
        let z: f64 = w.iter().sum();
        DurationDistribution {
            window,
            support: (1..=len).collect(),
            counts: vec![1; len],
            probabilities: w.iter().map(|v| v / z).collect(),
        }
    }

    #[test]
    fn counting_examples() {
        let d = dist_from(&[1, 1, 1]);
        assert_eq!(d.support, vec![1]);
        assert_eq!(d.probabilities, vec![1.0]);

        let d = dist_from(&[2, 5, 1, 2]);
        assert_eq!(d.support, vec![1, 2, 5]);
        assert_eq!(d.counts, vec![1, 2, 1]);
        assert_eq!(d.probabilities, vec![0.25, 0.5, 0.25]);
        assert_eq!(d.tau_max(), 5);

        assert!(matches!(
            DurationDistribution::<f64>::from_durations(3, &[]),
            Err(Error::EmptyPartition)
        ));
    }

    #[test]
    fn ordered_and_uniform_curves() {
        let c = entropy_curve(&dist_from(&[1, 1, 1]));
        assert_eq!(c.values, vec![0.0]);
        assert_eq!(c.shannon, 0.0);

        let c = entropy_curve(&dist_from(&[1, 2, 3, 4, 5]));
        for v in &c.values {
            assert!((v - 5f64.ln()).abs() < 1e-15);
        }
        assert!((c.shannon - 5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn exact_power_law_is_recovered() {
        let d = tabulated(100, |t| t.powf(-1.5), 50);
        let fit = fit_power_law(&d, (1, 50)).unwrap();
        assert!((fit.alpha - 1.5).abs() < 1e-6);
        assert!(!fit.is_mismatch());
        assert_eq!(fit.points, 50);
    }

    #[test]
    fn exponential_is_flagged() {
        let d = tabulated(100, |t| (-t).exp(), 50);
        let fit = fit_power_law(&d, (1, 50)).unwrap();
        assert!(fit.is_mismatch(), "residual {}", fit.residual);
    }

    #[test]
    fn power_law_needs_three_points() {
        let d = dist_from(&[1, 2, 2, 5]);
        assert!(matches!(
            fit_power_law(&d, (2, 5)),
            Err(Error::InsufficientSupport { have: 2, .. })
        ));
        assert_eq!(default_power_law_range(100), (2, 50));
    }

    #[test]
    fn exact_entropy_model_is_inverted() {
        let (s0, alpha, inv_n) = (-1.0, 1.5, 0.01);
        let support: Vec<usize> = (1..=300).collect();
        let values = support
            .iter()
            .map(|&t| s0 + alpha * (t as f64).ln() + inv_n * t as f64)
            .collect();
        let curve = EntropyCurve {
            window: 100,
            support,
            values,
            shannon: 0.0,
        };
        let fit = fit_entropy_model(&curve).unwrap();
        assert!((fit.s0 - s0).abs() < 1e-8);
        assert!((fit.alpha - alpha).abs() < 1e-8);
        assert!((fit.inv_n - inv_n).abs() < 1e-8);
    }

    #[test]
    fn entropy_model_degenerate_support() {
        let c = entropy_curve(&DurationDistribution::<f64>::from_durations(5, &[1, 1]).unwrap());
        assert!(matches!(
            fit_entropy_model(&c),
            Err(Error::InsufficientSupport { .. })
        ));
        // support entirely below n
        let c =
            entropy_curve(&DurationDistribution::<f64>::from_durations(50, &[1, 2, 3, 4]).unwrap());
        assert!(matches!(
            fit_entropy_model(&c),
            Err(Error::InsufficientSupport { .. })
        ));
    }
}
